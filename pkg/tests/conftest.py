import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger jit compilation up front so timed tests measure compute only."""
    from restore.graph import build_graph
    from restore.linalg import sym_eig_smallest
    from restore.randomwalk import Node2VecConfig, node2vec_embed

    sym_eig_smallest(np.eye(3), 1)
    g = build_graph([("a", "b"), ("b", "a")])
    node2vec_embed(g, 1, Node2VecConfig(walk_length=3, walks_per_node=1, context_size=1,
                                        epochs=1, seed=0))

"""Tree models and gap embeddings, linked by the layered translation."""

import random

from wqoforge import catalog
from wqoforge.io import load_document, load_gap_tree, load_tree_model
from wqoforge.treemodel import (
    dt_relabel,
    gap_embedding,
    grow_tree_model,
    is_gap_embedding,
    mtogap,
    random_tree_model,
    tm_embedding,
    tmeval,
)

## A tree model over min3 and the graph it denotes on its leaves
left = load_tree_model(load_document("builtin:tm_fig_left"))
right = load_tree_model(load_document("builtin:tm_fig_right"))
print("left leaves:", left.leaves, "edges:", tmeval(left).sorted_edges())
print("tree-model embedding:", tm_embedding(left, right))

## Gap embeddings: image paths carry labels at least as large, ending in an equal one
gl = load_gap_tree(load_document("builtin:gap_fig_left"))
gr = load_gap_tree(load_document("builtin:gap_fig_right"))
h = gap_embedding(gl, gr)
print("gap embedding:", h, "verified:", is_gap_embedding(gl, gr, h))

## Moving the parent edge label into the vertex drops the last-edge rule
print("relabelled, without the last-edge rule:", gap_embedding(dt_relabel(gl), dt_relabel(gr), last_equal=False))

## mtogap reflects the order: a gap embedding of the images gives a tree-model embedding
rng = random.Random(1)
m = catalog.min3()
found = 0
for _ in range(200):
    t1 = random_tree_model(m, rng.randint(1, 4), rng)
    t2 = grow_tree_model(t1, rng, rng.randint(0, 4))
    if gap_embedding(mtogap(t1), mtogap(t2)) is not None:
        found += 1
        assert tm_embedding(t1, t2) is not None
print(f"{found} gap embeddings among 200 grown pairs, each reflected")

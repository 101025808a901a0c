"""Hand-copied data from the worked 4-variable example."""
from gaussprove.algebra import LinearForm, Universe, Variable


U4 = Universe(4)


def H(d):
    return LinearForm({Variable.entropy(s): c for s, c in d.items()}, U4)


# the reduced inequality list of the worked 4-variable example, in its printed order
C_IV1 = [
    H({(4,): 1}), H({(1,): 1, (2,): 1, (1, 2): -1}), H({(1,): 1, (2,): 1, (4,): 1, (1, 2): -1}),
    H({(1,): 1, (3,): 1, (1, 3): -1}), H({(1,): 1, (3,): 1, (4,): 1, (1, 3): -1}),
    H({(2,): 1, (3,): 1, (2, 3): -1}), H({(2,): 1, (3,): 1, (4,): 1, (2, 3): -1}),
    H({(1,): -1, (1, 2): 1, (1, 3): 1, (1, 2, 3): -1}), H({(2,): -1, (1, 2): 1, (2, 3): 1, (1, 2, 3): -1}),
    H({(3,): -1, (1, 3): 1, (2, 3): 1, (1, 2, 3): -1}),
    H({(1,): -1, (4,): -1, (1, 2): 1, (1, 3): 1, (1, 2, 3, 4): -1}),
    H({(2,): -1, (4,): -1, (1, 2): 1, (2, 3): 1, (1, 2, 3, 4): -1}),
    H({(3,): -1, (4,): -1, (1, 3): 1, (2, 3): 1, (1, 2, 3, 4): -1}),
    H({(1, 2, 3): 1, (1, 2, 3, 4): -1}), H({(1, 2): -1, (1, 2, 3, 4): 1}), H({(1, 3): -1, (1, 2, 3, 4): 1}),
    H({(2, 3): -1, (1, 2, 3, 4): 1}), H({(1, 2, 3): -1, (1, 2, 3, 4): 1}),
]
F_IV1 = H({(1,): 1, (4,): -1})

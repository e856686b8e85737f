"""Published reference values used by the golden-table checks.

Periods are in units of hbar/|J0| at |epsilon| = 0.01 and J0 = -1. A period
of None marks a row whose trajectory never reaches the boundary; its
dynamics label then refers to epsilon = 0.
"""

TSTAR_TOLERANCE = 0.002
ETI_TOLERANCE = 0.001

# (label, kind) -> (T*, near-zero dynamics)
TSTAR_TABLE = {
    ("W1", "mixed"): (0.6285, "ESD"), ("W1", "pure"): (None, "TZD"),
    ("W2", "mixed"): (2.6185, "ESD"), ("W2", "pure"): (None, "TZD"),
    ("W3", "mixed"): (0.6283, "ESD"), ("W3", "pure"): (None, "TZD"),
    ("W4", "mixed"): (2.6185, "ESD"), ("W4", "pure"): (None, "TZD"),
    ("W5", "mixed"): (0.6283, "ESD"), ("W5", "pure"): (None, "TZD"),
    ("W6", "mixed"): (None, "TZD"), ("W6", "pure"): (None, "TZD"),
    ("W7", "mixed"): (0.8801, "ESD"), ("W7", "pure"): (0.5525, "ESB"),
    ("W8", "mixed"): (0.8779, "ESD"), ("W8", "pure"): (0.2822, "ESB"),
    ("W9", "mixed"): (0.5139, "ESD"), ("W9", "pure"): (0.3124, "ESD"),
    ("W10", "mixed"): (2.8819, "ESB"), ("W10", "pure"): (0.4422, "ESB"),
    ("W11", "mixed"): (0.7652, "ESD"), ("W11", "pure"): (0.5929, "ESB"),
    ("W12", "mixed"): (0.7652, "ESD"), ("W12", "pure"): (0.6036, "ESD"),
    ("W13", "mixed"): (0.5444, "ESD"), ("W13", "pure"): (0.1996, "ESD"),
    ("W14", "mixed"): (2.2990, "ESB"), ("W14", "pure"): (0.4406, "ESB"),
}

# mixed-state ETI accumulated by T*/4: (constant J, sinusoidal J)
ETI_QUARTER_TABLE = {
    ("W1", "W3", "W5"): (0.157, 0.100),
    ("W2", "W4"): (0.655, 0.417),
    ("W7", "W8"): (0.220, 0.140),
    ("W9",): (0.129, 0.082),
    ("W10",): (0.721, 0.459),
    ("W11", "W12"): (0.191, 0.122),
    ("W13",): (0.136, 0.087),
    ("W14",): (0.575, 0.366),
}

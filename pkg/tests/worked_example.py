"""The two-pass worked example: a planted 2-NN pool around a short forward move."""

from helpers import ev
from passvalue.knn_index import build_index
from passvalue.possession import Subsequence, enumerate_subsequences, segment_possessions


def stored_sub(points, label, parent):
    evs = tuple(ev(2 * i, 9, "Pass", a, b) for i, (a, b) in enumerate(zip(points, points[1:])))
    return Subsequence(parent, len(evs) - 1, evs, label)


def two_pass_setup():
    """Query sequence of two passes plus an index whose two nearest neighbours
    carry labels {0.0, 0.6} before the second pass and {0.4, 0.5} after it."""
    p1 = ev(0, 1, "Pass", (20, 30), (35, 30))
    p2 = ev(2, 1, "Pass", (35, 30), (50, 30))
    seq = segment_possessions([p1, p2, ev(4, 2)])[0]
    sub_before, sub_after = enumerate_subsequences(seq)
    pool = [
        stored_sub([(20, 30.5), (35, 30.5)], 0.0, 1), stored_sub([(20, 31), (35, 31)], 0.6, 2),
        stored_sub([(20, 33), (35, 33)], 1.0, 3),  # farther decoy
        stored_sub([(20, 30.2), (35, 30.2), (50, 30.2)], 0.4, 4),
        stored_sub([(20, 29.7), (35, 29.6), (50, 29.7)], 0.5, 5),
        stored_sub([(20, 25), (35, 25), (50, 25)], 0.0, 6),  # farther decoy
    ]
    return build_index(pool), sub_before, sub_after

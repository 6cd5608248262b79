"""Classification accuracy of generated images against intended categories."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import InputError


def accuracy(
    generated: Sequence[tuple[np.ndarray, int]],
    classify: Callable[[np.ndarray], np.ndarray],
) -> float:
    """Fraction of images whose classifier argmax equals the intended category."""
    if len(generated) == 0:
        raise InputError("accuracy needs at least one (image, category) pair")
    hits = sum(
        1 for image, intended in generated if int(np.argmax(classify(image))) == int(intended)
    )
    return hits / len(generated)

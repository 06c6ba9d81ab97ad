"""Keypoint predictor protocol and the mean-shape baseline."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cone_tools.core.exceptions import EmptyDataset
from cone_tools.synthetic.models import PatchSample

from .network import OUTPUT_DIM


@runtime_checkable
class KeypointPredictor(Protocol):
    """Anything that maps ``(N, P, P, 3)`` patches to ``(N, 14)`` patch-frame keypoints."""

    def predict(self, patches: ArrayLike) -> NDArray[np.float64]: ...


class MeanShapePredictor:
    """Predicts the same keypoint layout for every patch.

    The layout is fixed in patch coordinates, so its image-frame output
    moves and scales with the detection box only.
    """

    def __init__(self, mean: ArrayLike) -> None:
        self.mean = np.asarray(mean, dtype=np.float64).reshape(OUTPUT_DIM)

    @classmethod
    def fit(cls, samples: Sequence[PatchSample]) -> MeanShapePredictor:
        if not samples:
            raise EmptyDataset("cannot fit a mean shape to zero samples")
        targets = np.stack([s.keypoints.as_vector() for s in samples])
        return cls(targets.mean(axis=0))

    def predict(self, patches: ArrayLike) -> NDArray[np.float64]:
        count = len(np.asarray(patches)) if np.ndim(patches) == 4 else 1
        return np.tile(self.mean, (count, 1))


__all__ = ["KeypointPredictor", "MeanShapePredictor"]

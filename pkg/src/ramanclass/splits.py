"""Stratified experiment/validation split, 5-fold cross-validation, and
outlier-injection test scenarios."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, StratificationError
from .spectra import Label, SpectraSet
from .util import new_rng

STANDARD_SCENARIOS = (0, 8, 16, 24)


@dataclass(frozen=True)
class FoldPlan:
    """Cross-validation folds over the experimental set plus a held-out
    validation index set. Indices refer to the dataset the plan was made
    from."""

    folds: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    validation: tuple[int, ...]
    seed: int

    @property
    def n_folds(self) -> int:
        return len(self.folds)

    def experimental_indices(self) -> tuple[int, ...]:
        out: set[int] = set()
        for _, test in self.folds:
            out.update(test)
        return tuple(sorted(out))

    def to_json(self) -> str:
        doc = {
            "format_version": 1,
            "seed": self.seed,
            "validation": list(self.validation),
            "folds": [{"train": list(tr), "test": list(te)} for tr, te in self.folds],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FoldPlan":
        doc = json.loads(text)
        folds = tuple(
            (tuple(f["train"]), tuple(f["test"])) for f in doc["folds"]
        )
        return cls(folds=folds, validation=tuple(doc["validation"]), seed=int(doc["seed"]))


@dataclass(frozen=True)
class OutlierScenario:
    """Number of outlier-corpus spectra injected into a test set."""

    n_outliers: int

    def __post_init__(self):
        if self.n_outliers < 0:
            raise ValueError("n_outliers must be non-negative")


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def make_fold_plan(
    sset: SpectraSet,
    seed: int,
    n_folds: int = 5,
    validation_fraction: float = 0.25,
) -> FoldPlan:
    """Stratified 75:25 experimental/validation split, with the
    experimental part divided into stratified cross-validation folds.

    Per class, the validation share is rounded half-up and fold test
    sizes divide the remainder equally, leftover instances going to the
    earliest folds. Deterministic given the seed.
    """
    by_class: dict[Label, list[int]] = {Label.POSITIVE: [], Label.NEGATIVE: []}
    for i, s in enumerate(sset):
        if s.label is Label.UNLABELED:
            raise StratificationError(f"spectrum {i} is unlabeled; stratification needs pos/neg labels")
        by_class[s.label].append(i)

    rng = new_rng(seed)
    validation: list[int] = []
    fold_tests: list[list[int]] = [[] for _ in range(n_folds)]
    fold_trains: list[list[int]] = [[] for _ in range(n_folds)]
    # Positive first, then negative: fixed order keeps plans reproducible.
    for label in (Label.POSITIVE, Label.NEGATIVE):
        idx = np.array(by_class[label], dtype=int)
        if idx.size == 0:
            raise StratificationError(f"no {label.value} instances in dataset")
        idx = idx[rng.permutation(idx.size)]
        n_val = _round_half_up(validation_fraction * idx.size)
        experimental = idx[n_val:]
        if experimental.size < n_folds:
            raise StratificationError(
                f"class {label.value} has only {idx.size} instances; "
                f"too few for {n_folds} folds plus validation"
            )
        validation.extend(int(i) for i in idx[:n_val])
        base, rem = divmod(experimental.size, n_folds)
        start = 0
        for f in range(n_folds):
            size = base + (1 if f < rem else 0)
            chunk = experimental[start : start + size]
            start += size
            fold_tests[f].extend(int(i) for i in chunk)
            for g in range(n_folds):
                if g != f:
                    fold_trains[g].extend(int(i) for i in chunk)

    folds = tuple(
        (tuple(sorted(fold_trains[f])), tuple(sorted(fold_tests[f])))
        for f in range(n_folds)
    )
    return FoldPlan(folds=folds, validation=tuple(sorted(validation)), seed=seed)


def apply_scenario(
    test: SpectraSet,
    corpus: SpectraSet | None,
    scenario: OutlierScenario | int,
    seed: int,
) -> SpectraSet:
    """Append `n_outliers` corpus spectra (seeded shuffle order) to a
    test set, labeled negative. Scenario 0 returns the test set as is."""
    n = scenario.n_outliers if isinstance(scenario, OutlierScenario) else int(scenario)
    if n == 0:
        return test
    if corpus is None or n > len(corpus):
        have = 0 if corpus is None else len(corpus)
        raise ValueError(f"scenario needs {n} outliers but corpus has {have}")
    if corpus.grid != test.grid:
        raise GridMismatchError("outlier corpus must be resampled to the test grid first")
    rng = new_rng(seed)
    order = rng.permutation(len(corpus))[:n]
    injected = [corpus[int(i)].with_label(Label.NEGATIVE) for i in order]
    return SpectraSet(list(test.spectra) + injected, grid=test.grid)

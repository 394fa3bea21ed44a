import numpy as np
from scipy.stats import chi2_contingency


def histogram(truth: np.ndarray) -> np.ndarray:
    """Outcome counts for a (shots x 4) truth table with one true per row."""
    return truth.sum(axis=0).astype(int)


def same_distribution_pvalue(*hists) -> float:
    """Chi-square homogeneity p-value across histograms; all-zero columns dropped."""
    table = np.array(hists)
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 1.0
    return float(chi2_contingency(table)[1])


def within_sigma(counts, probs, shots: int, k: float = 3.0) -> bool:
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    sigma = np.sqrt(shots * probs * (1 - probs))
    return bool(np.all(np.abs(counts - shots * probs) <= k * sigma))

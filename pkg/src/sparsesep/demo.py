"""Cartoon + texture separation of a noisy image.

The cartoon part is modelled as sparse under finite differences and the
texture part as sparse under the 2-D DCT.  With ``A = I`` the separation
problem is::

    minimize ||Delta u||_1 + ||C v||_1  subject to  ||y - u - v||_2 <= eps
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, ImageTooLarge
from .io import write_pgm
from .operators import dct2_operator, finite_difference_operator
from .problems import from_analysis
from .solver import SolveOptions, solve_separation

__all__ = ["MAX_IMAGE_SIDE", "DemoMetrics", "snr_db", "demo_image", "toy_images"]

MAX_IMAGE_SIDE = 128


@dataclass(frozen=True)
class DemoMetrics:
    input_snr_db: float
    cartoon_snr_db: float
    gain_db: float
    epsilon: float
    converged: bool
    iterations: int
    runtime_s: float
    files: dict

    def to_dict(self):
        return asdict(self)


def snr_db(reference, estimate):
    """``10 log10(||reference||^2 / ||reference - estimate||^2)``; inf for a perfect match."""
    reference = np.asarray(reference, dtype=float)
    err = np.sum((reference - np.asarray(estimate, dtype=float)) ** 2)
    if err == 0:
        return np.inf
    return float(10 * np.log10(np.sum(reference**2) / err))


def toy_images(h=32, w=32):
    """Piecewise-constant cartoon and a single-frequency cosine texture in [0, 1]."""
    cartoon = np.full((h, w), 0.2)
    cartoon[h // 4: 3 * h // 4, w // 4: w // 2] = 0.8
    cartoon[h // 2:, 5 * w // 8:] = 0.5
    i, j = np.mgrid[0:h, 0:w]
    # a DCT-II grid frequency, so the texture is one coefficient in the DCT basis
    texture = 0.25 * np.cos(np.pi * (i + 0.5) * 6 / h) * np.cos(np.pi * (j + 0.5) * 5 / w)
    return cartoon, texture


def demo_image(cartoon, texture, snr, out_dir=None, seed=0, tau=1e-3, opts=None):
    """Separate ``cartoon + texture + noise`` and score the cartoon estimate.

    Parameters
    ----------
    cartoon, texture : array_like, shape (h, w)
        Components with values nominally in [0, 1]; ``h, w <= 128``.
    snr : float or None
        Noise level in dB relative to the mixture; None for no noise.
    out_dir : path, optional
        Where to write ``corrupted.pgm``, ``cartoon.pgm``, ``texture.pgm`` and
        ``metrics.json``.  The texture is signed and is written offset by 0.5.
    seed : int
        Seed of the noise draw.
    tau : float
        Identity weight of the regularized finite-difference operator.

    Returns
    -------
    metrics : DemoMetrics
    images : dict
        ``corrupted``, ``cartoon`` and ``texture`` arrays.
    """
    cartoon = np.asarray(cartoon, dtype=float)
    texture = np.asarray(texture, dtype=float)
    if cartoon.ndim != 2 or cartoon.shape != texture.shape:
        raise DimensionMismatch(f"image shapes differ: {cartoon.shape} vs {texture.shape}")
    h, w = cartoon.shape
    if max(h, w) > MAX_IMAGE_SIDE:
        raise ImageTooLarge(f"{h}x{w} exceeds {MAX_IMAGE_SIDE}x{MAX_IMAGE_SIDE}")

    clean = (cartoon + texture).ravel()
    if snr is None:
        noise = np.zeros_like(clean)
    else:
        rng = np.random.default_rng(seed)
        sigma = np.sqrt(np.mean(clean**2) / 10 ** (snr / 10))
        noise = sigma * rng.standard_normal(clean.size)
    y = clean + noise
    eps = float(np.linalg.norm(noise))

    problem = from_analysis(sp.identity(h * w, format="csr"),
                            finite_difference_operator(h, w, tau, sparse=True),
                            dct2_operator(h, w))
    result, parts = solve_separation(problem, y, eps, opts or SolveOptions())
    u = parts.signal1.real.reshape(h, w)
    v = parts.signal2.real.reshape(h, w)
    corrupted = y.reshape(h, w)

    in_snr = snr_db(cartoon, corrupted)
    out_snr = snr_db(cartoon, u)
    files = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, img in (("corrupted", corrupted), ("cartoon", u), ("texture", v + 0.5)):
            path = out / f"{name}.pgm"
            write_pgm(path, img)
            files[name] = str(path)
    metrics = DemoMetrics(
        input_snr_db=in_snr, cartoon_snr_db=out_snr, gain_db=out_snr - in_snr,
        epsilon=eps, converged=result.converged, iterations=result.iterations_used,
        runtime_s=result.runtime_s, files=files,
    )
    if out_dir is not None:
        (Path(out_dir) / "metrics.json").write_text(json.dumps(metrics.to_dict(), indent=2))
    return metrics, {"corrupted": corrupted, "cartoon": u, "texture": v}

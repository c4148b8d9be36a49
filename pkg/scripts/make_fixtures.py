"""Regenerate the text fixtures under tests/fixtures."""
import argparse
import pathlib

import numpy as np

from ncfuncalc import fileio
from ncfuncalc.doi import eval_f_AB
from ncfuncalc.functions2d import TrigPoly2D, random_trig_poly
from ncfuncalc.linalg import operator_norm, random_hermitian
from ncfuncalc.schurlab import build_counterexample

ROOT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main(out=ROOT):
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(2024)

    # lattice counterexample, N = 3
    N = 3
    tau = rng.uniform(-1, 1, (N, N))
    Z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    ce = build_counterexample(N, tau, Z / operator_norm(Z))
    fileio.write_function(out / "phi_lattice.fn", ce.f)
    fileio.write_matrix(out / "ce_A1.mat", ce.A1, "hermitian")
    fileio.write_matrix(out / "ce_A2.mat", ce.A2, "hermitian")
    fileio.write_matrix(out / "ce_B.mat", ce.B, "hermitian")

    # generic pair and trig polynomial with the library result
    f = random_trig_poly(rng, 2, omega=0.5)
    A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
    fileio.write_function(out / "trig.fn", f)
    fileio.write_matrix(out / "A.mat", A, "hermitian")
    fileio.write_matrix(out / "B.mat", B, "hermitian")
    fileio.write_matrix(out / "fAB_expected.mat", eval_f_AB(f, A, B).value)
    fileio.write_matrix(out / "B3.mat", random_hermitian(rng, 3), "hermitian")
    fileio.write_function(out / "one.fn", TrigPoly2D.constant(1.0))

    text = (out / "A.mat").read_text().splitlines()
    text[5] = "0.5 not-a-number"
    (out / "corrupted.mat").write_text("\n".join(text) + "\n")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=pathlib.Path, default=ROOT)
    main(p.parse_args().out)

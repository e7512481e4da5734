"""Smoke test for the qspec extension module.

Build and run from the repository root:

    cargo build --release -p qspec-py --features extension-module
    cp target/release/libqspec.so python/qspec.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.environ.get("QSPEC_MODULE_DIR", os.path.dirname(os.path.abspath(__file__))))

import qspec  # noqa: E402


def main():
    adj = qspec.quantum_dim(2, [1, 1])
    assert adj.classical_value == 8
    assert adj.exact.terms() == [(-4, 1), (-2, 2), (0, 2), (2, 2), (4, 1)]
    assert adj.exact == qspec.char_at_k2rho(2, [1, 1])
    assert adj.exact == qspec.char_at_k2rho(2, [1, 1], inverse=True)
    assert adj.exact.is_palindromic()
    assert str(qspec.qnum(3)) == "q^-2 + 1 + q^2"
    assert abs(adj.exact.eval(0.5) - qspec.quantum_dim_numeric(2, [1, 1], 0.5)) < 1e-12

    big = qspec.classical_dim(3, [40, 40, 40])
    assert isinstance(big, int) and big == qspec.quantum_dim(3, [40, 40, 40]).exact.coefficient_sum()

    gt = qspec.multiplicities(2, [1, 1])
    assert len(gt) == 7 and gt[(0, 0)] == 2
    assert gt == qspec.multiplicities(2, [1, 1], method="freudenthal")
    assert qspec.family_slopes(4, 1, 2, (2, 1)) == (-8, [-5, -1, -1, -1])

    model = qspec.SpectrumModel(2, 0.5)
    assert abs(model.spectral_dimension() - 4.0) < 1e-3
    assert abs(model.spectral_dimension("qdim-inverse", "pure") - 4.0) < 1e-3
    assert abs(model.spectral_dimension("classical")) < 0.05
    z = model.zeta(5.0)
    assert z["converged"] and z["value"] > 0
    assert not model.zeta(3.5)["converged"]
    cfg = qspec.SpectrumModel.from_json('{"ell": 3, "q": 0.3, "N": 1}')
    assert cfg.ell == 3

    toy = qspec.SpectrumModel.toy(2, 0.5)
    gap = 1.0
    x = 0.5 ** gap
    assert abs(toy.zeta(4.0 + gap, tol=1e-15)["value"] - x / (1 - x)) < 1e-12
    assert abs(toy.residue(tol=1e-14) - 1 / math.log(2)) < 1e-8 / math.log(2)

    mm = qspec.ModularModel.shift(120, 0.5, 4.0)
    scan = mm.defect_scan([4.5, 4.25, 4.125, 4.0625])
    defects = [d for _, d in scan]
    assert all(b < a for a, b in zip(defects, defects[1:]))
    lhs, rhs = mm.trace_check(4.0625)
    assert abs(abs(lhs - rhs) - defects[-1]) < 1e-12
    assert abs(mm.conjugation_bound() - 8.0) < 1e-9

    b = [[((i * 7 + j * 3) % 11) / 11 - 0.5 for j in range(60)] for i in range(60)]
    d = [0.5 ** -m for m in range(1, 61)]
    assert qspec.commutator_split_defect(d, b, 3.0, 4) < 1e-6
    assert all(abs(1 / p + 1 / q - 1) < 1e-14 for p, q in qspec.holder_exponents(2.5, 5))

    try:
        qspec.quantum_dim(2, [1, -1])
    except ValueError:
        pass
    else:
        raise AssertionError("non-dominant weight accepted")
    try:
        qspec.multiplicities(3, [5, 5, 5], cap=10)
    except qspec.ResourceError:
        pass
    else:
        raise AssertionError("pattern cap not enforced")

    passed, checks = qspec.run_verify("quick")
    assert passed, [c for c in checks if c[1] != "pass"]
    print(f"smoke test passed ({len(checks)} verify checks)")


if __name__ == "__main__":
    main()

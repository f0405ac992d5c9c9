"""Reducing general cubic systems to the standard parameters.

Two demonstrations: the cross-coupled reference system
i v1' = v2^2 conj(v1), i v2' = v1^2 conj(v2), and a randomly conjugated
standard system whose reduction must undo the disguise.
"""

import numpy as np

from cubicnls.standard_form import (
    GeneralCubic,
    StandardParams,
    reduce_to_standard,
    standard_system,
    transform_cubic,
)


def show(tag, params, trace):
    print(f"{tag}:")
    print(f"  p = {np.round(params.p, 12)}")
    print(f"  q = {np.round(params.q, 12)}")
    print(f"  mass form  = {np.round(trace.mass_form, 12)}")
    print(f"  completion = {np.round(trace.linear_change, 6).tolist()}")
    print(f"  rotation   = {trace.rotation_angle:.6f} rad, sign flip = {trace.component_sign_flip}")


def main() -> None:
    v_system = GeneralCubic((0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0))
    show("cross-coupled v-system", *reduce_to_standard(v_system))

    rng = np.random.default_rng(5)
    seed_params = StandardParams(0.7, -0.4, 0.9, 0.2, 0.3, 0.1, -0.2, 0.4)
    M = rng.uniform(-1.2, 1.2, (2, 2))
    while abs(np.linalg.det(M)) < 0.4:
        M = rng.uniform(-1.2, 1.2, (2, 2))
    disguised = transform_cubic(standard_system(seed_params), M)
    params, trace = reduce_to_standard(disguised)
    print()
    show("random conjugation, recovered", params, trace)
    # a general conjugation rescales the conserved mass, so the parameters
    # come back multiplied by one common factor
    scale = params.p1 / seed_params.p1
    print(f"  seed p           = {np.round(seed_params.p, 12)}")
    print(f"  common scale     = {scale:.6f}")
    print(f"  direction error  = {np.max(np.abs(params.p / scale - seed_params.p)):.2e}")
    print(f"  potential error  = {np.max(np.abs(params.q / scale - seed_params.q)):.2e}")


if __name__ == "__main__":
    main()

"""Pin BLAS/OpenMP pools to one thread before numpy loads anywhere.

Keeps timing-sensitive tests honestly single-threaded and results
reproducible across machines with different core counts.
"""

import os

for _var in (
    "OPENBLAS_NUM_THREADS",
    "OMP_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
):
    os.environ.setdefault(_var, "1")

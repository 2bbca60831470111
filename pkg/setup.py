from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled kernels bit-identical to the pure
# Python backend: no FMA contraction, no fast-math reassociation.
extensions = [
    Extension(
        "levdiag.kernels._ckernels",
        ["src/levdiag/kernels/_ckernels.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are an accelerator, not a requirement: motifset falls
# back to the pure NumPy twins in motifset._purepy when the extension is
# absent.  No -ffast-math: the distance kernels rely on IEEE semantics.
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "motifset._ext",
                ["src/motifset/_ext.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)

#!/usr/bin/env python3

import sys
try:
    from setuptools import setup
except ImportError:
    print("The 'setuptools' python library is needed for libopsim to build.", file=sys.stderr)
    sys.exit(1)


setup(
    name='libopsim',
    version='0.0.1',
    packages=[
        "libopsim",
        "libopsim.format",
        "libopsim.lab",
    ],
    scripts=['opsim'],
    license='GPL v2',
    author='The libopsim authors',
    author_email='',
    description='Similarity, renorming and dilation checks for finite-dimensional operators',
    install_requires=['numpy', 'scipy', 'PyYAML'],
    extras_require={'test': ['pytest']},
    python_requires='>=3.8',
)

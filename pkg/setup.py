#!/usr/bin/env python

"""
setup.py
"""

from setuptools import setup, find_packages

setup(
    name='fockbounds',
    version='0.1.0',
    description='Numerical frame bounds for Gaussian Gabor systems near the '
                'critical density.',
    license='Apache 2.0',
    packages=find_packages('src/'),
    package_dir={'': 'src'},
    classifiers=['Development Status :: 4 - Beta',
                 'License :: OSI Approved :: Apache Software License',
                 'Topic :: Scientific/Engineering :: Mathematics',
                 'Programming Language :: Python :: 3'],
    install_requires=["numpy", "scipy >= 1.12", "mpmath"],
    entry_points={
        'console_scripts': ['fockbounds = fockbounds.cli:main'],
    },
    zip_safe=False,
)

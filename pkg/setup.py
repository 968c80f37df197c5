# setup.py
# Package definition for the rulefuse library and command line tool

from setuptools import setup

with open("requirements.txt") as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith("#")]

setup(
    name='rulefuse',
    version='0.1',
    description='Sparse safety-rule discovery fused with expert risk rules for explainable churn prediction',
    package_dir={'': '.'},
    packages=['lib'],  # Treat 'lib' as a package
    install_requires=[r for r in requirements if not r.startswith('pytest')],
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': ['rulefuse=lib.cli:main']},
    python_requires='>=3.9',
)

# Command to install for development:
# pip install -e .[test]

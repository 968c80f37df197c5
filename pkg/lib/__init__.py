# Core library for rulefuse: binarization, sparse rule learning, expert rules and
# joint label/explanation classification. The CLI lives in lib.cli.
__version__ = "0.1"

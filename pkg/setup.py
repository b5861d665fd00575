from setuptools import setup

from hybridlattice import __author__, __author_email__, __name__, __version__

setup(
    name=__name__,
    version=__version__,
    description=(
        'Flux-qubit and NV-ensemble chains analysed as bosonic lattices'
    ),
    author=__author__,
    author_email=__author_email__,
)

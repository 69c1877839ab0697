from setuptools import setup

with open("requirements.txt") as stream:
    requirements = [line.strip() for line in stream if line.strip() and not line.startswith("#")]

setup(
    name="pauliplane",
    version="0.1.0",
    description="Symmetries and exact spectra of planar Pauli Hamiltonians for neutral spin-1/2 particles",
    packages=["pauliplane", "pauliplane.models", "pauliplane.orm"],
    package_dir={"": "src"},
    python_requires=">=3.8",
    install_requires=requirements,
    entry_points={"console_scripts": ["pauliplane = pauliplane.cli:main"]},
)

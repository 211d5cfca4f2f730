from setuptools import find_packages, setup

setup(
    name="magint",
    version="0.1.0",
    description="Symbolic-numeric toolkit for quadratically integrable magnetic Hamiltonians in 3D",
    packages=find_packages(exclude=["tests"]),
    package_data={"magint.catalog": ["data/*.json"]},
    python_requires=">=3.9",
    install_requires=[
        "appdirs",
        "joblib",
        "matplotlib",
        "mementos",
        "numexpr",
        "numpy",
        "pandas>=1.5",
        "pyparsing>=3.1",
        "scipy",
        "sympy>=1.10",
    ],
    extras_require={"test": ["pytest", "hypothesis", "flaky"]},
    entry_points={"console_scripts": ["magint=magint.cli:main"]},
)

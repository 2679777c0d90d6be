from setuptools import find_packages, setup

setup(
    name="qspa-experiments",
    version="1.0",
    packages=find_packages(where="src", exclude=("test",)),
    package_dir={"": "src"},

    # use `conda env update --file environment.yml` to install full dependencies
    install_requires=[
        "numpy>=1.17",
        "scipy>=1.4",
        "pandas>=1.1.5",
        "numba>=0.52.0",
    ],
    entry_points={
        "console_scripts": ["qspa=qspa_experiments.cli:main"],
    },
)

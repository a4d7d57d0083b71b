from setuptools import setup

setup(
    name="libotda",
    version="1.0a1",
    packages=[
        "libotda",
        "libotda.core",
        "libotda.ot",
        "libotda.mapping",
        "libotda.featsel",
        "libotda.eval",
        "libotda.cli",
    ],
    package_dir={"": "python"},
    include_package_data=False,
)

from setuptools import setup, find_packages

setup(
    name="mac_cipher",
    version="0.1.0",
    description="MAC-address keyed file and image cipher with evaluation metrics",
    packages=find_packages(exclude=["tests", "scripts"]),
    install_requires=[
        "numpy",
        "pypubsub",
        "PyYAML",
        "markdown",
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
    },
    entry_points={
        "console_scripts": [
            "mac-cipher=mac_cipher.cli:main",
        ],
    },
)

from setuptools import setup, find_packages

setup(
    name="bmw-workbench",
    version="1.0.0",
    description="Exact-arithmetic workbench for Brauer and BMW algebras",
    author="BMW Workbench Team",
    author_email="team@example.com",
    packages=find_packages(include=["bmw_workbench", "bmw_workbench.*", "config", "config.*"]),
    install_requires=[
        "sympy>=1.13",
        "python-dotenv>=1.0.0",
        "pydantic>=2.0.0",
    ],
    extras_require={
        "yaml": ["PyYAML>=6.0.0"],
    },
    entry_points={
        "console_scripts": [
            "bmw-workbench=bmw_workbench.cli:main",
        ],
    },
    python_requires=">=3.8",
)

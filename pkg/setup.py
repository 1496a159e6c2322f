from setuptools import find_packages, setup

with open("README.md", "r", encoding = "utf-8") as file:
    long_description = file.read()

with open("LICENSE", "r", encoding = "utf-8") as file:
    license_text = file.read()

setup(
    name = "meshcoop",
    packages = find_packages(exclude = ["tests", "examples", "examples.*"]),
    version = "1.0.0",
    description = "Cooperative game analysis of wireless mesh networks shared by multiple service providers.",
    python_requires = ">=3.10",
    install_requires = [
        "numpy>=1.24",
        "scipy>=1.10",
        "networkx>=3.0",
        "matplotlib>=3.7",
        "pandas>=2.0",
        "tqdm==4.66.2"
    ],
    setup_requires = ["pytest-runner"],
    tests_require = ["pytest>=7.0"],
    test_suite = "tests",
    entry_points = {
        "console_scripts": ["meshcoop=meshcoop.Cli:main"]
    },
    long_description = long_description,
    long_description_content_type = "text/markdown",
    license = license_text
)

"""Set up the rdfinterval package."""
import setuptools


with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()


setuptools.setup(
    name="rdfinterval",
    version="1.0.0",
    description=(
        "Encode RDF knowledge bases with hierarchical interval codes, "
        "materialize RDFS types and answer SPARQL basic graph patterns "
        "under the RDFS entailment regime."
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    python_requires=">=3.10",
    author="Nathan Baker",
    author_email="nathanandrewbaker@gmail.com",
    packages=setuptools.find_packages(exclude=["tests", "examples*"]),
    install_requires=[
        "pandas",
        "openpyxl",
        "numpy",
        "networkx",
        "rdflib",
        "pyparsing",
    ],
    tests_require=["pytest"],
    entry_points={
        "console_scripts": ["rdfinterval=rdfinterval.__main__:main"]
    },
    keywords="rdf rdfs sparql dictionary-encoding reasoning",
    url="https://github.com/Electrostatics/rdfinterval",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Database",
        "Topic :: Scientific/Engineering :: Information Analysis",
    ],
)

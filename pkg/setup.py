from setuptools import setup, find_packages
import setuptools

# should match henondevaney/common.py#HENONDEVANEY_VERSION
HENONDEVANEY_VERSION = "0.1.0"

if int(setuptools.__version__.split('.')[0]) < 25:
    print(
        "WARNING: Please upgrade setuptools to a newer version, otherwise installation may break. "
        "Recommended command: `pip3 install -U setuptools`"
    )


def get_requirements(*requirements_file_paths):
    requirements = []
    for requirements_file_path in requirements_file_paths:
        with open(requirements_file_path) as requirements_file:
            for line in requirements_file:
                line = line.strip()
                if line and line[0] != '#' and line[0:2] != '-r':
                    requirements.append(line)
    return requirements


setup(
    name='henondevaney',
    version=HENONDEVANEY_VERSION,
    description='Symbolic dynamics of the Henon-Devaney map and the Boole map',
    long_description=(
        'Exact and floating-point iteration of f(x, y) = (x + 1/y, y - 1/y - x), its '
        'exceptional curves, the two-sided symbolic coding of orbits, cylinder decoding, '
        'periodic point search and the one-dimensional Boole map, behind the `hd` command.'
    ),
    license='Apache License 2.0',
    keywords='dynamical systems symbolic dynamics henon devaney boole',
    packages=find_packages(exclude=["tests*"]),
    classifiers=[
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.6",
        "License :: OSI Approved :: Apache Software License",
    ],
    python_requires='>=3.6',
    include_package_data=True,
    install_requires=get_requirements('requirements.txt'),
    entry_points={'console_scripts': ['hd=henondevaney.bin.hd:main']},
    zip_safe=False,
)

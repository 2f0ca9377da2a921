from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='strata',

    # Versions should comply with PEP440.
    version='0.1',

    description='Toolpath compiler for color-mixing filament printers',
    long_description=long_description,
    long_description_content_type='text/markdown',

    license='MIT',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Developers',
        'Intended Audience :: Manufacturing',
        'Topic :: Multimedia :: Graphics :: 3D Modeling',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3',
    ],

    keywords='3d-printing gcode mixing-nozzle toolpath',

    packages=find_packages(exclude=['contrib', 'docs', 'tests']),

    # List run-time dependencies here.  These will be installed by pip when
    # your project is installed.
    install_requires=['six', 'numpy', 'scipy', 'shapely'],

    # $ pip install -e .[test]
    extras_require={
        'test': ['pytest'],
    },

    entry_points={
        'console_scripts': [
            'strata=strata.cli:main',
        ],
    },
)

import setuptools
import dual_sonc

with open('README.md', 'r') as fh:
    long_description = fh.read()

setuptools.setup(
    name='Dual-SONC',
    version=dual_sonc.__version__,
    description='Certified lower bounds for sparse polynomials and exponential sums '
    'from the dual SONC cone.',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=setuptools.find_packages(exclude=('tests', 'examples')),
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.6',
    ],
    entry_points={
        'console_scripts': [
            'dual-sonc=dual_sonc.main:main',
        ]
    },
    package_data={'dual_sonc.example_instances': ['json/*.json']},
    include_package_data=True,
    python_requires='>=3.7',
)

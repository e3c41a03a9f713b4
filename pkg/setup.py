from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name='interfere',
    version='0.3.0',
    description='Randomized experiments under network interference - estimators, variance decomposition, dependency diagnostics and simulation studies',
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=['interfere', 'interfere.*']),
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Operating System :: OS Independent',
    ],
    keywords='causal inference interference networks randomized experiments monte carlo statistics',
    install_requires=[
        'click>=8.0.0',
        'PyYAML>=6.0',
        'numpy>=1.22',
        'scipy>=1.8',
        'networkx>=2.8',
    ],
    extras_require={
        'test': ['pytest>=7.0'],
    },
    entry_points={
        'console_scripts': [
            'interfere=interfere.cli:cli',
        ],
    },
    python_requires='>=3.9',
    include_package_data=True,
    zip_safe=False,
)

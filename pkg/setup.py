from setuptools import setup, find_packages

packages = find_packages(where="src", include=["stpipe", "stpipe.*"])

setup(
    name='stpipe',
    version='1.0.0',
    description='stpipe is a text-side speech translation pipeline toolkit: normalization, BPE, ASR noise simulation, n-gram LM reranking, recasing and BLEU/WER scoring, chained by config driven pipelines.',
    license='GNU GPLv3',
    packages=packages,
    package_data={'': ['core/settings.yaml', 'builder/config_file.yaml', 'data/confusions.tsv']},
    entry_points={
        'console_scripts': [
            'stpipe=stpipe.scripts.stpipe_cli:main',
        ],
    },
    package_dir={
        "": "src"
    },
    python_requires='>=3.6',
    install_requires=[
        'networkx',
        'numpy',
        'six',
        'PyYAML',
    ],
)

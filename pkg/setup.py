from setuptools import setup, find_packages
import sys

def validate_python() -> None:
    """Refuse to build on interpreters older than 3.10"""
    if sys.version_info < (3, 10):
        sys.exit(f"bm-lab needs Python >= 3.10, found {sys.version.split()[0]}")

base_reqs = [
    'fastapi', 'pydantic>=2', 'uvicorn', 'python-dotenv',
    'numpy', 'click>=8.2', 'rich'
]

if __name__ == "__main__":
    validate_python()

    setup(
        name="bm-lab",
        version="0.1.0",
        packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
        python_requires=">=3.10",
        install_requires=base_reqs,
        extras_require={
            'test': ['pytest', 'pytest-asyncio', 'hypothesis', 'httpx'],
            'dev': ['mypy', 'black', 'isort']
        },
        entry_points={
            'console_scripts': [
                'bm-lab=src.cli:main',
                'bm-lab-api=src.api.server:main'
            ]
        }
    )

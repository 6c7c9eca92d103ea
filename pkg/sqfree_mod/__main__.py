"""__main__"""
from .cli import main

main()

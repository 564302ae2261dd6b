from interdiv.cli import main

main()

from plopt.cli import main

raise SystemExit(main())

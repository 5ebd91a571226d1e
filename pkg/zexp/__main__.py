from zexp.cli import main

raise SystemExit(main())

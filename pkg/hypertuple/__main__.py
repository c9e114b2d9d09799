from hypertuple.cli import main

raise SystemExit(main())

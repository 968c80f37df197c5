# rulefuse.py
# Runs the rulefuse CLI from a source checkout without installing the package.
#   python rulefuse.py synth --config configs/synthetic.json --out data/synth
#   python rulefuse.py run --config configs/synthetic.json --rules rules/golden4.rules --out out
#   python rulefuse.py frontier --config configs/synthetic.json --subset lrr= --subset golden4=rules/golden4.rules --out out/frontier
import sys

from lib.cli import main

if __name__ == "__main__":
    sys.exit(main())

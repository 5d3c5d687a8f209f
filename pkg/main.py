import os
import sys

import cli


def main():
    # 必要なディレクトリを作成
    os.makedirs("config", exist_ok=True)
    os.makedirs("logs", exist_ok=True)

    sys.exit(cli.run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""CLI helper that prints the default experiment as JSON, ready to edit."""

from lens_crlb.config import default_config, dump_config


def print_default_config() -> None:
    print(dump_config(default_config()), end="")


if __name__ == "__main__":
    print_default_config()

import logging
from pathlib import Path

logger = logging.getLogger(__name__)


class StorageManager:
    """Local output directory handling for study results"""

    def __init__(self, out_dir: str = '.'):
        self.out_dir = Path(out_dir)

    def validate_save_location(self) -> bool:
        """Create the output directory if needed and check that it is writable"""
        test_file = self.out_dir / '.interfere_access_test'
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            test_file.write_text('test')
            test_file.unlink()
            return True
        except PermissionError:
            logger.error("Permission denied to write to '%s'", self.out_dir)
            return False
        except OSError as e:
            logger.error("Output directory '%s' is not usable: %s", self.out_dir, e)
            return False

    def save_file(self, content: str, filename: str) -> str:
        """Write ``content`` under the output directory; returns the path written"""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / filename
        with open(path, 'w', newline='') as f:
            f.write(content)
        logger.debug("Wrote %s (%d bytes)", path, len(content))
        return str(path)

import copy
import json
from pathlib import Path

from hybridlattice.config import chain_from_dict
from hybridlattice.errors import ConfigError


class PresetStorage(object):
    """This class is a singleton.

    It is an interface to the configuration presets shipped with the package.
    """

    _PRESETS_DIR = 'presets'

    def __new__(cls):
        """Making the singleton class."""
        if not hasattr(cls, '_instance'):
            cls._instance = super(PresetStorage, cls).__new__(cls)
            cls._instance._init_storage()
        return cls._instance

    def _init_storage(self):
        """Reads the preset files.

        :raises ConfigError:
        :return: None
        """
        self._presets = {}
        presets_dir = Path(__file__).parent.joinpath(self._PRESETS_DIR)
        for file_path in sorted(presets_dir.glob('*.json')):
            with file_path.open('r') as preset_file:
                try:
                    self._presets[file_path.stem] = json.load(preset_file)
                except json.JSONDecodeError as exc:
                    raise ConfigError(file_path.name, f'malformed JSON: {exc}')

    def names(self):
        """Lists the preset names.

        :rtype: list
        """
        return sorted(self._presets)

    def get_config(self, name):
        """Gets a copy of a preset's configuration dictionary.

        :param name: Preset name
        :type name: str
        :raises ConfigError:
        :rtype: dict
        """
        try:
            return copy.deepcopy(self._presets[name])
        except KeyError:
            raise ConfigError(
                'preset',
                f'unknown preset {name!r}; choose from '
                f'{", ".join(self.names())}',
            )

    def get_description(self, name):
        """Gets a preset's one-line description.

        :param name: Preset name
        :type name: str
        :return: Description if the preset has one otherwise an empty string
        :rtype: str
        """
        return self.get_config(name).get('description', '')

    def get_chain(self, name):
        """Parses a preset into a ChainSpec.

        :param name: Preset name
        :type name: str
        :raises ConfigError:
        :rtype: ChainSpec
        """
        return chain_from_dict(self.get_config(name))

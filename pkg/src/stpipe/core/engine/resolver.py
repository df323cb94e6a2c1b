import copy
import logging
import os
import string


class ReplacementsDict(dict):
    """ Implement the __missing__ method for dictionary so that it returns '{<key>}'
        when the value is not present so that when it is passed to the str.format
        function, missing keys do not raise an exception.
    """

    def __missing__(self, key):
        return "{" + key + "}"


class Resolver(object):
    """ Expands environment variables and "{name}" replacements in config values.
    """

    def __init__(self, replacements=None):
        """
        Args:
            replacements (dict): Dictionary of values to use as the replacements.
        """
        if replacements is not None and not isinstance(replacements, ReplacementsDict):
            replacements = ReplacementsDict(replacements)
        self.replacements = replacements

    def resolve(self, value):
        """
        Recurses into dicts + lists replacing $ENV variables and {replacement_name}
        tokens in every string. Returns a resolved copy; the input is left untouched.

        NOTE: Dictionaries or lists containing themselves will cause infinite
        recursion.

        Args:
            value (str, dict or list): An instance to do replacements for.
        """
        if isinstance(value, dict):
            return type(value)((key, self.resolve(dict_value)) for key, dict_value in value.items())

        if isinstance(value, list):
            return [self.resolve(list_value) for list_value in value]

        if isinstance(value, str):
            return self._replace_replacements(value)

        return copy.deepcopy(value)

    def _replace_replacements(self, value):

        # Expanding environment variables first allows a replacement name to come
        # from the environment. IE: {$MY_REPLACEMENT_NAME_FROM_ENV}
        value = os.path.expandvars(value)

        if self.replacements is None:
            return value

        try:
            value = string.Formatter().vformat(value, (), self.replacements)
        except (IndexError, ValueError):
            # Positional fields like {0} or stray braces; leave the value as it was.
            logging.warning("Failed to replace value '%s'" % value)

        # Replacement values may themselves contain environment variables.
        return os.path.expandvars(value)

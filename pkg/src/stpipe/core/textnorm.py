""" Punctuation normalization, tokenization, detokenization, lowercasing, punctuation
stripping and English number verbalization.

All functions are pure. A token sequence is a plain list of non-empty strings
without whitespace.

The tokenizer rules are a frozen approximation of the usual statistical MT
preprocessing scripts:
    * whitespace separates chunks;
    * . , ! ? ; : ( ) " - become separate tokens;
    * dotted acronyms ("E.U.") stay one token;
    * periods and grouping commas between digits stay inside the number ("3.5", "1,000");
    * hyphens between word characters stay attached ("well-known");
    * an apostrophe between word characters starts a clitic token ("don't" -> "don", "'t").
"""
import re
import unicodedata

_PUNCT_TABLE = {
    u"‘": u"'",  # left single quote
    u"’": u"'",  # right single quote / apostrophe
    u"‚": u"'",
    u"‛": u"'",
    u"′": u"'",
    u"“": u'"',
    u"”": u'"',
    u"„": u'"',
    u"‟": u'"',
    u"″": u'"',
    u"«": u'"',
    u"»": u'"',
    u"‒": u"-",
    u"–": u"-",  # en dash
    u"—": u"-",  # em dash
    u"―": u"-",
    u"−": u"-",
    u"…": u"...",
    u"\u00a0": u" ",  # non-breaking spaces
    u"\u202f": u" ",
    u"\u2007": u" ",
    u"\x00": u"",
}
_PUNCT_TRANSLATION = dict((ord(key), value) for key, value in _PUNCT_TABLE.items())

_WHITESPACE_RE = re.compile(r"\s+", re.UNICODE)

_WORD = u"[^\\s.,!?;:()\"'\\-]+"
_PIECE_RE = re.compile(
    u"(?:[^\\W\\d_]\\.){2,}"             # dotted acronyms
    u"|[0-9]+(?:[.,][0-9]+)+"            # decimals and digit groups
    u"|%s(?:-%s)*" % (_WORD, _WORD) +    # words, inner hyphens kept
    u"|'"
    u"|[.,!?;:()\"\\-]",
    re.UNICODE,
)
_WORD_PIECE_RE = re.compile(u"%s(?:-%s)*$" % (_WORD, _WORD), re.UNICODE)

_SPACE_BEFORE_RE = re.compile(u" ([.,!?;:')])")
_SPACE_AFTER_OPEN_RE = re.compile(u"\\( ")

_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen",
]
_TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]

MAX_CARDINAL = 10 ** 9

_INTEGER_RE = re.compile(r"^(?:[0-9]{1,3}(?:,[0-9]{3})+|[0-9]+)$")
_DECIMAL_RE = re.compile(r"^([0-9]+)\.([0-9]+)$")


def normalize_punct(raw):
    """ Maps typographic punctuation to ASCII, collapses whitespace runs and trims.

        Args:
            raw (str): Untokenized text.

        Returns:
            str: Normalized text. Idempotent.
    """
    text = raw.translate(_PUNCT_TRANSLATION)
    return _WHITESPACE_RE.sub(u" ", text).strip()


def _merge_clitics(pieces):
    tokens = []
    index = 0
    while index < len(pieces):
        piece = pieces[index]
        if (piece == u"'" and tokens and tokens[-1][-1].isalnum()
                and index + 1 < len(pieces) and _WORD_PIECE_RE.match(pieces[index + 1])):
            tokens.append(u"'" + pieces[index + 1])
            index += 2
            continue
        tokens.append(piece)
        index += 1
    return tokens


def tokenize(raw):
    """ Splits normalized text into tokens. Does not normalize.

        Args:
            raw (str): Normalized text.

        Returns:
            list: Token sequence.
    """
    tokens = []
    for chunk in raw.split():
        tokens.extend(_merge_clitics(_PIECE_RE.findall(chunk)))
    return tokens


def detokenize(tokens):
    """ Joins tokens with spaces, then removes the space before . , ! ? ; : ' )
        and after "(". Lossy with respect to the original text, but tokenizing
        the result reproduces any sequence that tokenize produced.
    """
    if not tokens:
        return u""
    text = u" ".join(tokens)
    text = _SPACE_BEFORE_RE.sub(u"\\1", text)
    return _SPACE_AFTER_OPEN_RE.sub(u"(", text)


def lowercase(tokens):
    return [token.lower() for token in tokens]


def is_punct_char(char):
    """ True for Unicode punctuation (P*) and symbol (S*) characters.
    """
    return unicodedata.category(char)[0] in ("P", "S")


def strip_punct(tokens):
    """ Removes punctuation and symbols. Every punctuation or symbol character
        becomes a token boundary except an apostrophe directly followed by a
        letter, so "e.u." -> "e", "u", "100%" -> "100" and "'t" is kept.
    """
    stripped = []
    for token in tokens:
        chars = []
        for index, char in enumerate(token):
            if char == u"'" and index + 1 < len(token) and token[index + 1].isalpha():
                chars.append(char)
            elif is_punct_char(char):
                chars.append(u" ")
            else:
                chars.append(char)
        stripped.extend(u"".join(chars).split())
    return stripped


def _hundreds_to_words(number):
    words = []
    hundreds, rest = divmod(number, 100)
    if hundreds:
        words.extend([_ONES[hundreds], "hundred"])
        if rest:
            words.append("and")
    if rest:
        if rest < 20:
            words.append(_ONES[rest])
        else:
            tens, ones = divmod(rest, 10)
            words.append(_TENS[tens])
            if ones:
                words.append(_ONES[ones])
    return words


def number_to_words(number):
    """ British-style cardinal words for 0 <= number < 10**9, one word per item,
        with "and" after hundreds and before a final sub-hundred group.

        Raises:
            ValueError: number outside the supported range.
    """
    if not 0 <= number < MAX_CARDINAL:
        raise ValueError("Cannot verbalize %r" % number)
    if number == 0:
        return ["zero"]

    millions, rest = divmod(number, 10 ** 6)
    thousands, units = divmod(rest, 1000)

    words = []
    if millions:
        words.extend(_hundreds_to_words(millions) + ["million"])
    if thousands:
        words.extend(_hundreds_to_words(thousands) + ["thousand"])
    if units:
        if words and units < 100:
            words.append("and")
        words.extend(_hundreds_to_words(units))
    return words


def digits_to_words(digits):
    return [_ONES[int(digit)] for digit in digits]


def verbalize_token(token):
    """ Returns the words for one numeric token, or None if it is not a number.
    """
    if _INTEGER_RE.match(token):
        value = int(token.replace(u",", u""))
        if value < MAX_CARDINAL:
            return number_to_words(value)
        # Out of cardinal range: read digit by digit.
        return digits_to_words(token.replace(u",", u""))

    match = _DECIMAL_RE.match(token)
    if match:
        integer_part, fraction = match.groups()
        value = int(integer_part)
        if value < MAX_CARDINAL:
            head = number_to_words(value)
        else:
            head = digits_to_words(integer_part)
        return head + ["point"] + digits_to_words(fraction)

    return None


def verbalize_numbers(tokens):
    """ Replaces integer and decimal tokens with their cardinal words. Tokens
        mixing digits with letters or symbols are left unchanged.
    """
    verbalized = []
    for token in tokens:
        words = verbalize_token(token)
        if words is None:
            verbalized.append(token)
        else:
            verbalized.extend(words)
    return verbalized


def _ascii_digit(char):
    value = unicodedata.digit(char, None)
    return char if value is None else str(value)


def fold_digits(token):
    """ Maps every character with a digit value (Arabic-Indic, fullwidth,
        superscript and so on) to the matching ASCII digit.
    """
    if all(ord(char) < 128 for char in token):
        return token
    return u"".join(_ascii_digit(char) for char in token)

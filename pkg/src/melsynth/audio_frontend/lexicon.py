"""Small bundled pronunciation lexicon (stress-stripped ARPAbet).

Covers roughly two hundred frequent English words so toy corpora and the
benchmark sentence phonemize without external tools. Unknown words fall back
to letter spelling in :func:`melsynth.audio_frontend.vocab.tokenize_text`.
"""

LEXICON = {
    "a": ["AH"],
    "about": ["AH", "B", "AW", "T"],
    "after": ["AE", "F", "T", "ER"],
    "again": ["AH", "G", "EH", "N"],
    "air": ["EH", "R"],
    "all": ["AO", "L"],
    "also": ["AO", "L", "S", "OW"],
    "always": ["AO", "L", "W", "EY", "Z"],
    "an": ["AE", "N"],
    "and": ["AE", "N", "D"],
    "animal": ["AE", "N", "AH", "M", "AH", "L"],
    "another": ["AH", "N", "AH", "DH", "ER"],
    "answer": ["AE", "N", "S", "ER"],
    "any": ["EH", "N", "IY"],
    "are": ["AA", "R"],
    "around": ["ER", "AW", "N", "D"],
    "as": ["AE", "Z"],
    "ask": ["AE", "S", "K"],
    "at": ["AE", "T"],
    "away": ["AH", "W", "EY"],
    "back": ["B", "AE", "K"],
    "be": ["B", "IY"],
    "because": ["B", "IH", "K", "AO", "Z"],
    "been": ["B", "IH", "N"],
    "before": ["B", "IH", "F", "AO", "R"],
    "began": ["B", "IH", "G", "AE", "N"],
    "best": ["B", "EH", "S", "T"],
    "better": ["B", "EH", "T", "ER"],
    "between": ["B", "IH", "T", "W", "IY", "N"],
    "big": ["B", "IH", "G"],
    "bird": ["B", "ER", "D"],
    "blue": ["B", "L", "UW"],
    "boat": ["B", "OW", "T"],
    "book": ["B", "UH", "K"],
    "both": ["B", "OW", "TH"],
    "boy": ["B", "OY"],
    "bright": ["B", "R", "AY", "T"],
    "but": ["B", "AH", "T"],
    "by": ["B", "AY"],
    "call": ["K", "AO", "L"],
    "came": ["K", "EY", "M"],
    "can": ["K", "AE", "N"],
    "car": ["K", "AA", "R"],
    "children": ["CH", "IH", "L", "D", "R", "AH", "N"],
    "city": ["S", "IH", "T", "IY"],
    "close": ["K", "L", "OW", "S"],
    "cold": ["K", "OW", "L", "D"],
    "come": ["K", "AH", "M"],
    "could": ["K", "UH", "D"],
    "country": ["K", "AH", "N", "T", "R", "IY"],
    "dark": ["D", "AA", "R", "K"],
    "day": ["D", "EY"],
    "did": ["D", "IH", "D"],
    "different": ["D", "IH", "F", "ER", "AH", "N", "T"],
    "do": ["D", "UW"],
    "does": ["D", "AH", "Z"],
    "dog": ["D", "AO", "G"],
    "down": ["D", "AW", "N"],
    "each": ["IY", "CH"],
    "early": ["ER", "L", "IY"],
    "earth": ["ER", "TH"],
    "end": ["EH", "N", "D"],
    "enough": ["IH", "N", "AH", "F"],
    "even": ["IY", "V", "AH", "N"],
    "evening": ["IY", "V", "N", "IH", "NG"],
    "every": ["EH", "V", "ER", "IY"],
    "eyes": ["AY", "Z"],
    "far": ["F", "AA", "R"],
    "fast": ["F", "AE", "S", "T"],
    "father": ["F", "AA", "DH", "ER"],
    "few": ["F", "Y", "UW"],
    "find": ["F", "AY", "N", "D"],
    "fire": ["F", "AY", "ER"],
    "first": ["F", "ER", "S", "T"],
    "five": ["F", "AY", "V"],
    "follow": ["F", "AA", "L", "OW"],
    "food": ["F", "UW", "D"],
    "for": ["F", "AO", "R"],
    "found": ["F", "AW", "N", "D"],
    "four": ["F", "AO", "R"],
    "friend": ["F", "R", "EH", "N", "D"],
    "from": ["F", "R", "AH", "M"],
    "garden": ["G", "AA", "R", "D", "AH", "N"],
    "gave": ["G", "EY", "V"],
    "get": ["G", "EH", "T"],
    "girl": ["G", "ER", "L"],
    "give": ["G", "IH", "V"],
    "go": ["G", "OW"],
    "going": ["G", "OW", "IH", "NG"],
    "gone": ["G", "AO", "N"],
    "good": ["G", "UH", "D"],
    "great": ["G", "R", "EY", "T"],
    "green": ["G", "R", "IY", "N"],
    "ground": ["G", "R", "AW", "N", "D"],
    "grow": ["G", "R", "OW"],
    "had": ["HH", "AE", "D"],
    "hand": ["HH", "AE", "N", "D"],
    "hard": ["HH", "AA", "R", "D"],
    "has": ["HH", "AE", "Z"],
    "have": ["HH", "AE", "V"],
    "he": ["HH", "IY"],
    "head": ["HH", "EH", "D"],
    "hear": ["HH", "IY", "R"],
    "heard": ["HH", "ER", "D"],
    "help": ["HH", "EH", "L", "P"],
    "her": ["HH", "ER"],
    "here": ["HH", "IY", "R"],
    "high": ["HH", "AY"],
    "him": ["HH", "IH", "M"],
    "his": ["HH", "IH", "Z"],
    "home": ["HH", "OW", "M"],
    "house": ["HH", "AW", "S"],
    "how": ["HH", "AW"],
    "i": ["AY"],
    "if": ["IH", "F"],
    "in": ["IH", "N"],
    "into": ["IH", "N", "T", "UW"],
    "is": ["IH", "Z"],
    "it": ["IH", "T"],
    "its": ["IH", "T", "S"],
    "it's": ["IH", "T", "S"],
    "just": ["JH", "AH", "S", "T"],
    "keep": ["K", "IY", "P"],
    "kind": ["K", "AY", "N", "D"],
    "knew": ["N", "UW"],
    "know": ["N", "OW"],
    "land": ["L", "AE", "N", "D"],
    "large": ["L", "AA", "R", "JH"],
    "last": ["L", "AE", "S", "T"],
    "later": ["L", "EY", "T", "ER"],
    "learn": ["L", "ER", "N"],
    "leave": ["L", "IY", "V"],
    "left": ["L", "EH", "F", "T"],
    "let": ["L", "EH", "T"],
    "light": ["L", "AY", "T"],
    "like": ["L", "AY", "K"],
    "line": ["L", "AY", "N"],
    "little": ["L", "IH", "T", "AH", "L"],
    "live": ["L", "IH", "V"],
    "long": ["L", "AO", "NG"],
    "look": ["L", "UH", "K"],
    "made": ["M", "EY", "D"],
    "make": ["M", "EY", "K"],
    "man": ["M", "AE", "N"],
    "many": ["M", "EH", "N", "IY"],
    "may": ["M", "EY"],
    "me": ["M", "IY"],
    "men": ["M", "EH", "N"],
    "might": ["M", "AY", "T"],
    "more": ["M", "AO", "R"],
    "morning": ["M", "AO", "R", "N", "IH", "NG"],
    "most": ["M", "OW", "S", "T"],
    "mother": ["M", "AH", "DH", "ER"],
    "mountain": ["M", "AW", "N", "T", "AH", "N"],
    "move": ["M", "UW", "V"],
    "much": ["M", "AH", "CH"],
    "music": ["M", "Y", "UW", "Z", "IH", "K"],
    "must": ["M", "AH", "S", "T"],
    "my": ["M", "AY"],
    "name": ["N", "EY", "M"],
    "near": ["N", "IY", "R"],
    "never": ["N", "EH", "V", "ER"],
    "new": ["N", "UW"],
    "next": ["N", "EH", "K", "S", "T"],
    "night": ["N", "AY", "T"],
    "no": ["N", "OW"],
    "not": ["N", "AA", "T"],
    "now": ["N", "AW"],
    "number": ["N", "AH", "M", "B", "ER"],
    "of": ["AH", "V"],
    "off": ["AO", "F"],
    "often": ["AO", "F", "AH", "N"],
    "old": ["OW", "L", "D"],
    "on": ["AA", "N"],
    "once": ["W", "AH", "N", "S"],
    "one": ["W", "AH", "N"],
    "only": ["OW", "N", "L", "IY"],
    "open": ["OW", "P", "AH", "N"],
    "or": ["AO", "R"],
    "other": ["AH", "DH", "ER"],
    "our": ["AW", "ER"],
    "out": ["AW", "T"],
    "over": ["OW", "V", "ER"],
    "own": ["OW", "N"],
    "paper": ["P", "EY", "P", "ER"],
    "part": ["P", "AA", "R", "T"],
    "people": ["P", "IY", "P", "AH", "L"],
    "place": ["P", "L", "EY", "S"],
    "plant": ["P", "L", "AE", "N", "T"],
    "play": ["P", "L", "EY"],
    "point": ["P", "OY", "N", "T"],
    "put": ["P", "UH", "T"],
    "question": ["K", "W", "EH", "S", "CH", "AH", "N"],
    "quick": ["K", "W", "IH", "K"],
    "quiet": ["K", "W", "AY", "AH", "T"],
    "rain": ["R", "EY", "N"],
    "read": ["R", "IY", "D"],
    "right": ["R", "AY", "T"],
    "river": ["R", "IH", "V", "ER"],
    "road": ["R", "OW", "D"],
    "run": ["R", "AH", "N"],
    "said": ["S", "EH", "D"],
    "same": ["S", "EY", "M"],
    "saw": ["S", "AO"],
    "say": ["S", "EY"],
    "school": ["S", "K", "UW", "L"],
    "sea": ["S", "IY"],
    "second": ["S", "EH", "K", "AH", "N", "D"],
    "see": ["S", "IY"],
    "seem": ["S", "IY", "M"],
    "set": ["S", "EH", "T"],
    "seven": ["S", "EH", "V", "AH", "N"],
    "she": ["SH", "IY"],
    "ship": ["SH", "IH", "P"],
    "short": ["SH", "AO", "R", "T"],
    "should": ["SH", "UH", "D"],
    "show": ["SH", "OW"],
    "side": ["S", "AY", "D"],
    "silver": ["S", "IH", "L", "V", "ER"],
    "sing": ["S", "IH", "NG"],
    "six": ["S", "IH", "K", "S"],
    "sky": ["S", "K", "AY"],
    "sleep": ["S", "L", "IY", "P"],
    "slow": ["S", "L", "OW"],
    "small": ["S", "M", "AO", "L"],
    "so": ["S", "OW"],
    "some": ["S", "AH", "M"],
    "something": ["S", "AH", "M", "TH", "IH", "NG"],
    "song": ["S", "AO", "NG"],
    "soon": ["S", "UW", "N"],
    "sound": ["S", "AW", "N", "D"],
    "still": ["S", "T", "IH", "L"],
    "stone": ["S", "T", "OW", "N"],
    "stop": ["S", "T", "AA", "P"],
    "story": ["S", "T", "AO", "R", "IY"],
    "summer": ["S", "AH", "M", "ER"],
    "sun": ["S", "AH", "N"],
    "take": ["T", "EY", "K"],
    "tell": ["T", "EH", "L"],
    "ten": ["T", "EH", "N"],
    "than": ["DH", "AE", "N"],
    "that": ["DH", "AE", "T"],
    "the": ["DH", "AH"],
    "their": ["DH", "EH", "R"],
    "them": ["DH", "EH", "M"],
    "then": ["DH", "EH", "N"],
    "there": ["DH", "EH", "R"],
    "these": ["DH", "IY", "Z"],
    "they": ["DH", "EY"],
    "thing": ["TH", "IH", "NG"],
    "think": ["TH", "IH", "NG", "K"],
    "this": ["DH", "IH", "S"],
    "those": ["DH", "OW", "Z"],
    "thought": ["TH", "AO", "T"],
    "three": ["TH", "R", "IY"],
    "through": ["TH", "R", "UW"],
    "time": ["T", "AY", "M"],
    "to": ["T", "UW"],
    "together": ["T", "AH", "G", "EH", "DH", "ER"],
    "told": ["T", "OW", "L", "D"],
    "too": ["T", "UW"],
    "took": ["T", "UH", "K"],
    "tree": ["T", "R", "IY"],
    "turn": ["T", "ER", "N"],
    "two": ["T", "UW"],
    "under": ["AH", "N", "D", "ER"],
    "until": ["AH", "N", "T", "IH", "L"],
    "up": ["AH", "P"],
    "us": ["AH", "S"],
    "use": ["Y", "UW", "Z"],
    "very": ["V", "EH", "R", "IY"],
    "voice": ["V", "OY", "S"],
    "walk": ["W", "AO", "K"],
    "want": ["W", "AA", "N", "T"],
    "warm": ["W", "AO", "R", "M"],
    "was": ["W", "AA", "Z"],
    "watch": ["W", "AA", "CH"],
    "water": ["W", "AO", "T", "ER"],
    "way": ["W", "EY"],
    "we": ["W", "IY"],
    "well": ["W", "EH", "L"],
    "went": ["W", "EH", "N", "T"],
    "were": ["W", "ER"],
    "what": ["W", "AH", "T"],
    "when": ["W", "EH", "N"],
    "where": ["W", "EH", "R"],
    "which": ["W", "IH", "CH"],
    "while": ["W", "AY", "L"],
    "white": ["W", "AY", "T"],
    "who": ["HH", "UW"],
    "why": ["W", "AY"],
    "wild": ["W", "AY", "L", "D"],
    "will": ["W", "IH", "L"],
    "wind": ["W", "IH", "N", "D"],
    "winter": ["W", "IH", "N", "T", "ER"],
    "with": ["W", "IH", "DH"],
    "word": ["W", "ER", "D"],
    "work": ["W", "ER", "K"],
    "world": ["W", "ER", "L", "D"],
    "would": ["W", "UH", "D"],
    "write": ["R", "AY", "T"],
    "year": ["Y", "IY", "R"],
    "yellow": ["Y", "EH", "L", "OW"],
    "yes": ["Y", "EH", "S"],
    "you": ["Y", "UW"],
    "young": ["Y", "AH", "NG"],
    "your": ["Y", "AO", "R"],
}

import re

WORD = re.compile(r"[A-Za-z']+")


def tokens(line):
    return WORD.findall(line.lower())


def count_words(lines):
    counts = {}
    for line in lines:
        for word in tokens(line):
            counts[word] = counts.get(word, 0) + 1
    return counts

#!/usr/bin/env python3
"""Regenerate valence_oracle.tsv from the reference rule implementation.

Requires `pip install vaderSentiment==3.3.2`. The reference rounds the
compound score to 4 decimals; this script recomputes the unrounded value
through the same code path so the fixture can be compared at 1e-9.

Output columns: sentence (tab/newline free), matched (0/1), compound (repr).
"""
import random
import sys

from vaderSentiment import vaderSentiment as vs


class Unrounded(vs.SentimentIntensityAnalyzer):
    def score_valence(self, sentiments, text):
        if not sentiments:
            return {"compound": 0.0}
        sum_s = float(sum(sentiments))
        amp = self._punctuation_emphasis(text)
        if sum_s > 0:
            sum_s += amp
        elif sum_s < 0:
            sum_s -= amp
        return {"compound": vs.normalize(sum_s)}


def matched(analyzer, text):
    no_emoji = ""
    prev_space = True
    for ch in text:
        if ch in analyzer.emojis:
            if not prev_space:
                no_emoji += " "
            no_emoji += analyzer.emojis[ch]
            prev_space = False
        else:
            no_emoji += ch
            prev_space = ch == " "
    words = vs.SentiText(no_emoji.strip()).words_and_emoticons
    return any(w.lower() in analyzer.lexicon for w in words)


HAND = [
    "VADER is smart, handsome, and funny.",
    "VADER is smart, handsome, and funny!",
    "VADER is very smart, handsome, and funny.",
    "VADER is VERY SMART, handsome, and FUNNY.",
    "VADER is VERY SMART, handsome, and FUNNY!!!",
    "VADER is VERY SMART, uber handsome, and FRIGGIN FUNNY!!!",
    "VADER is not smart, handsome, nor funny.",
    "The book was good.",
    "At least it isn't a horrible book.",
    "The book was only kind of good.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Make sure you :) or :D today!",
    "Catch utf-8 emoji such as \U0001F498 and \U0001F48B and \U0001F601",
    "Not bad at all",
    "Sentiment analysis has never been good.",
    "Sentiment analysis has never been this good!",
    "Most automated sentiment analysis tools are shit.",
    "With VADER, sentiment analysis is the shit!",
    "Other sentiment analysis tools can be quite bad.",
    "On the other hand, VADER is quite bad ass",
    "VADER is such a badass!",
    "Without a doubt, excellent idea.",
    "Roger Dodger is one of the most compelling variations on this theme.",
    "Roger Dodger is at least compelling as a variation on the theme.",
    "Roger Dodger is one of the least compelling variations on this theme.",
    "Not such a badass after all.",
    "Without a doubt, an excellent idea.",
    "I am extremely NOT pleased!!!!",
    "I am not pleased",
    "I am happy!!",
    "I am happy",
    "the of and",
    "",
    "   ",
    ":) great",
    "no problem at all, glad to help",
    "There is no love lost here",
    "no no no",
    "Is this real??",
    "Is this real???? no way, awful",
    "What a beautiful day?? I love it",
    "the storm knocked out power, stay safe everyone",
    "Hurricane warning issued for the coast. Please evacuate now!",
    "so scared right now, the wind is terrible",
    "power is back, thank god, everyone is safe",
    "We lost everything in the flood but we are alive and grateful",
    "this traffic is kind of annoying but whatever",
    "sort of sad to see the old pier destroyed",
    "it was not the worst, but not great either",
    "I can't believe how good this is",
    "I cant stand this weather, ugh",
    "He isn't bad, he is the bomb",
    "that concert was to die for",
    "yeah right, like that will help",
    "kiss of death for the season",
    "waiting at the bus stop in the rain",
    "never so happy to see the sun",
    "without doubt the best team",
    "nothing good ever happens here",
    "Neither good nor bad",
    "ALL CAPS TWEET ABOUT HAPPY THINGS",
    "mostly lowercase but ANGRY",
    "GREAT job team, really GREAT",
    "It's a beautiful day in the neighborhood #blessed @friend https://t.co/abc123",
    "so glad everyone is ok \U0001F64F\U0001F64F",
    "rip to everyone we lost \U0001F622",
    "\U0001F602\U0001F602\U0001F602 this is hilarious",
    "ugh\U0001F621 no power for 3 days",
    "Café closed, très triste",
    "ÜBER cool weather today",
    "love love love",
    "hate hate hate!!!!!!!",
    "Not good. Not bad. Just ok.",
    "least favorite day",
    "at least we are safe",
    "very least helpful",
    "the shelter was absolutely amazing",
    "barely survived the night, exhausted",
    "hardly a disaster, just some wind",
    "the damage is utterly devastating",
    "DON'T panic, stay calm",
    "don't worry, be happy",
    "wasn't that bad honestly",
    "I don't think it's good",
    "thanks to all the volunteers helping out",
    "thoughts and prayers for Houston",
    "this is a disaster, everything is destroyed",
    "I'm ok, thanks for asking :)",
    "boarded up the windows :( hope it holds",
    "can't stop crying, our home is gone",
    "nope, not leaving",
    "uh-uh, no way I'm driving in that",
    "rarely this happy",
    "seldom good news",
    "despite the storm, a great wedding",
]

BOOSTERS = ["very", "extremely", "so", "really", "totally", "kinda", "barely",
            "slightly", "incredibly", "hella", "sort of", "kind of", "VERY"]
NEGATORS = ["not", "never", "don't", "isn't", "cannot", "without", "no", "nothing",
            "ain't", "NOT", "wasn't"]
FILLERS = ["the", "day", "was", "today", "we", "it", "is", "city", "people", "and",
           "our", "house", "street", "in", "after", "this", "that", "at", "least",
           "but", "or", "nor", "doubt", "this", "so"]
ENDINGS = ["", ".", "!", "!!", "!!!!!", "?", "??", "???", "????", "?!", " :)", " :(", " lol"]


def random_sentence(rng, words):
    n = rng.randint(2, 10)
    toks = []
    for _ in range(n):
        r = rng.random()
        if r < 0.35:
            w = rng.choice(words)
        elif r < 0.5:
            w = rng.choice(BOOSTERS)
        elif r < 0.62:
            w = rng.choice(NEGATORS)
        else:
            w = rng.choice(FILLERS)
        if rng.random() < 0.12:
            w = w.upper()
        elif rng.random() < 0.08:
            w = w.capitalize()
        if rng.random() < 0.1:
            w = w + rng.choice([",", ".", "!", "..."])
        toks.append(w)
    if rng.random() < 0.15:
        toks.insert(rng.randint(0, len(toks)), "but")
    return " ".join(toks) + rng.choice(ENDINGS)


def main():
    rng = random.Random(20170825)
    analyzer = Unrounded()
    words = sorted(w for w in analyzer.lexicon if w.isalpha())
    sentences = list(HAND)
    while len(sentences) < 200:
        sentences.append(random_sentence(rng, words))
    out = sys.stdout
    out.write("# sentence\tmatched\tcompound\n")
    for s in sentences:
        assert "\t" not in s and "\n" not in s
        c = analyzer.polarity_scores(s)["compound"]
        out.write("%s\t%d\t%r\n" % (s, 1 if matched(analyzer, s) else 0, c))


if __name__ == "__main__":
    main()

#pragma once

#include <algorithm>
#include <array>
#include <string_view>
#include <utility>

namespace charforge {

// Present participles that the orthographic rules get wrong or that follow
// a spelling convention the rules cannot infer. Sorted by lemma.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 62>
    kGerundExceptions = {{
        {"age", "aging"},
        {"arc", "arcing"},
        {"be", "being"},
        {"benefit", "benefiting"},
        {"bias", "biasing"},
        {"bivouac", "bivouacking"},
        {"bus", "busing"},
        {"canoe", "canoeing"},
        {"chagrin", "chagrining"},
        {"combat", "combating"},
        {"dye", "dyeing"},
        {"eye", "eyeing"},
        {"focus", "focusing"},
        {"format", "formatting"},
        {"frolic", "frolicking"},
        {"gas", "gassing"},
        {"handicap", "handicapping"},
        {"hiccup", "hiccuping"},
        {"hoe", "hoeing"},
        {"humbug", "humbugging"},
        {"input", "inputting"},
        {"kidnap", "kidnapping"},
        {"leapfrog", "leapfrogging"},
        {"lie", "lying"},
        {"mimic", "mimicking"},
        {"output", "outputting"},
        {"overrun", "overrunning"},
        {"panic", "panicking"},
        {"picnic", "picnicking"},
        {"program", "programming"},
        {"queue", "queuing"},
        {"quit", "quitting"},
        {"quiz", "quizzing"},
        {"rue", "ruing"},
        {"sashay", "sashaying"},
        {"shellac", "shellacking"},
        {"shoe", "shoeing"},
        {"singe", "singeing"},
        {"ski", "skiing"},
        {"squat", "squatting"},
        {"squeegee", "squeegeeing"},
        {"squib", "squibbing"},
        {"sync", "syncing"},
        {"taxi", "taxiing"},
        {"tinge", "tingeing"},
        {"tiptoe", "tiptoeing"},
        {"toe", "toeing"},
        {"traffic", "trafficking"},
        {"underpin", "underpinning"},
        {"unpin", "unpinning"},
        {"unplug", "unplugging"},
        {"unzip", "unzipping"},
        {"upset", "upsetting"},
        {"vie", "vying"},
        {"visit", "visiting"},
        {"wed", "wedding"},
        {"whinge", "whingeing"},
        {"wiretap", "wiretapping"},
        {"worship", "worshiping"},
        {"zigzag", "zigzagging"},
        {"zinc", "zincking"},
        {"zip", "zipping"},
    }};

// Disyllables (and a few longer verbs) stressed on the final syllable, whose
// final consonant doubles.
inline constexpr std::array<std::string_view, 51> kStressFinalVerbs = {
    "abet",    "abhor",   "acquit",  "admit",   "allot",   "annul",
    "appal",   "begin",   "commit",  "compel",  "concur",  "confer",
    "control", "debar",   "defer",   "demur",   "deter",   "embed",
    "emit",    "enrol",   "equip",   "excel",   "expel",   "extol",
    "forbid",  "forget",  "incur",   "infer",   "inter",   "impel",
    "occur",   "omit",    "outbid",  "outrun",  "patrol",  "permit",
    "prefer",  "propel",  "rebel",   "rebut",   "recur",   "refer",
    "regret",  "remit",   "repel",   "submit",  "transfer", "transmit",
    "beset",   "befit",   "outwit"};

static_assert(std::is_sorted(kGerundExceptions.begin(), kGerundExceptions.end()),
              "gerund exception table must stay sorted");

}  // namespace charforge

#include "newspulse/stemmer.hpp"

namespace newspulse {

namespace {

struct Stemmer {
    std::string b; // working buffer
    size_t k = 0;  // index of last character of the current stem
    size_t j = 0;  // index of last character of the stem before a candidate suffix

    bool is_consonant(size_t i) const {
        switch (b[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_consonant(i - 1);
        default:
            return true;
        }
    }

    // Measure of the stem b[0..j]: the number of VC sequences.
    int m() const {
        int n = 0;
        size_t i = 0;
        for (;;) {
            if (i > j) return n;
            if (!is_consonant(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j) return n;
                if (is_consonant(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j) return n;
                if (!is_consonant(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (size_t i = 0; i <= j; ++i)
            if (!is_consonant(i)) return true;
        return false;
    }

    bool double_consonant(size_t i) const {
        if (i < 1) return false;
        if (b[i] != b[i - 1]) return false;
        return is_consonant(i);
    }

    // consonant - vowel - consonant ending, where the final consonant is
    // not w, x or y.
    bool cvc(size_t i) const {
        if (i < 2 || !is_consonant(i) || is_consonant(i - 1) || !is_consonant(i - 2)) return false;
        char ch = b[i];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        if (s.size() > k + 1) return false;
        if (b.compare(k + 1 - s.size(), s.size(), s) != 0) return false;
        j = k - s.size();
        return true;
    }

    void set_to(std::string_view s) {
        b.replace(j + 1, k - j, s);
        k = j + s.size();
    }

    void replace_if_m(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (b[k] == 's') {
            if (ends("sses")) k -= 2;
            else if (ends("ies")) set_to("i");
            else if (b[k - 1] != 's') --k;
        }
        if (ends("eed")) {
            if (m() > 0) --k;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            if (ends("at")) set_to("ate");
            else if (ends("bl")) set_to("ble");
            else if (ends("iz")) set_to("ize");
            else if (double_consonant(k)) {
                char ch = b[k];
                --k;
                if (ch == 'l' || ch == 's' || ch == 'z') ++k;
            } else if (m() == 1 && cvc(k)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b[k] = 'i';
    }

    void step2() {
        switch (b[k - 1]) {
        case 'a':
            if (ends("ational")) { replace_if_m("ate"); break; }
            if (ends("tional")) { replace_if_m("tion"); break; }
            break;
        case 'c':
            if (ends("enci")) { replace_if_m("ence"); break; }
            if (ends("anci")) { replace_if_m("ance"); break; }
            break;
        case 'e':
            if (ends("izer")) { replace_if_m("ize"); break; }
            break;
        case 'l':
            if (ends("bli")) { replace_if_m("ble"); break; }
            if (ends("alli")) { replace_if_m("al"); break; }
            if (ends("entli")) { replace_if_m("ent"); break; }
            if (ends("eli")) { replace_if_m("e"); break; }
            if (ends("ousli")) { replace_if_m("ous"); break; }
            break;
        case 'o':
            if (ends("ization")) { replace_if_m("ize"); break; }
            if (ends("ation")) { replace_if_m("ate"); break; }
            if (ends("ator")) { replace_if_m("ate"); break; }
            break;
        case 's':
            if (ends("alism")) { replace_if_m("al"); break; }
            if (ends("iveness")) { replace_if_m("ive"); break; }
            if (ends("fulness")) { replace_if_m("ful"); break; }
            if (ends("ousness")) { replace_if_m("ous"); break; }
            break;
        case 't':
            if (ends("aliti")) { replace_if_m("al"); break; }
            if (ends("iviti")) { replace_if_m("ive"); break; }
            if (ends("biliti")) { replace_if_m("ble"); break; }
            break;
        case 'g':
            if (ends("logi")) { replace_if_m("log"); break; }
            break;
        }
    }

    void step3() {
        switch (b[k]) {
        case 'e':
            if (ends("icate")) { replace_if_m("ic"); break; }
            if (ends("ative")) { replace_if_m(""); break; }
            if (ends("alize")) { replace_if_m("al"); break; }
            break;
        case 'i':
            if (ends("iciti")) { replace_if_m("ic"); break; }
            break;
        case 'l':
            if (ends("ical")) { replace_if_m("ic"); break; }
            if (ends("ful")) { replace_if_m(""); break; }
            break;
        case 's':
            if (ends("ness")) { replace_if_m(""); break; }
            break;
        }
    }

    void step4() {
        switch (b[k - 1]) {
        case 'a': if (ends("al")) break; return;
        case 'c': if (ends("ance")) break; if (ends("ence")) break; return;
        case 'e': if (ends("er")) break; return;
        case 'i': if (ends("ic")) break; return;
        case 'l': if (ends("able")) break; if (ends("ible")) break; return;
        case 'n':
            if (ends("ant")) break;
            if (ends("ement")) break;
            if (ends("ment")) break;
            if (ends("ent")) break;
            return;
        case 'o':
            if (ends("ion") && j > 0 && (b[j] == 's' || b[j] == 't')) break;
            if (ends("ou")) break;
            return;
        case 's': if (ends("ism")) break; return;
        case 't': if (ends("ate")) break; if (ends("iti")) break; return;
        case 'u': if (ends("ous")) break; return;
        case 'v': if (ends("ive")) break; return;
        case 'z': if (ends("ize")) break; return;
        default: return;
        }
        if (m() > 1) k = j;
    }

    void step5() {
        j = k;
        if (b[k] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
        }
        if (b[k] == 'l' && double_consonant(k) && m() > 1) --k;
    }

    std::string run(std::string_view word) {
        b.assign(word);
        if (b.size() <= 2) return b;
        k = b.size() - 1;
        step1ab();
        if (k > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        b.resize(k + 1);
        return b;
    }
};

} // namespace

std::string porter_stem(std::string_view word) {
    Stemmer s;
    return s.run(word);
}

} // namespace newspulse

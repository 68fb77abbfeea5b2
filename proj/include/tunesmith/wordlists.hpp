/**
 * @file wordlists.hpp
 * @brief Word sets loaded from one-word-per-line files, with built-in defaults.
 *
 * The built-in texts are byte-identical copies of data/stopwords.txt and
 * data/dangling.txt.
 */
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include "tunesmith/text.hpp"

namespace tunesmith {

class WordSet {
 public:
  WordSet() = default;

  /// One word per line; '#' starts a comment line.
  static WordSet parse(std::string_view text) {
    WordSet s;
    for (auto raw : split_lines(text)) {
      auto line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      s.words_.insert(to_lower(line));
    }
    return s;
  }

  static WordSet load(const std::filesystem::path& path) { return parse(read_file(path)); }

  bool contains(std::string_view w) const { return words_.count(to_lower(w)) > 0; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
};

inline constexpr std::string_view kBuiltinStopwords = R"(# English function words excluded from salient-word extraction,
# keyword planning and co-occurrence counting.
a
about
above
after
again
against
ah
all
am
an
and
any
are
art
as
at
be
because
been
before
being
below
between
both
but
by
can
cannot
could
did
do
does
doing
doth
down
during
each
ere
few
for
from
further
had
has
hast
hath
have
having
he
her
here
hers
herself
him
himself
his
how
i
if
in
into
is
it
its
itself
just
me
mine
more
most
my
myself
nay
no
nor
not
now
o
of
off
oft
oh
on
once
only
or
other
our
ours
ourselves
out
over
own
same
shall
shalt
she
should
so
some
such
than
that
the
thee
their
theirs
them
themselves
then
there
these
they
thine
this
those
thou
though
through
thus
thy
thyself
to
too
under
until
up
upon
very
was
we
were
what
when
where
which
while
who
whom
whose
why
will
with
would
ye
yet
you
your
yours
yourself
yourselves
)";

inline constexpr std::string_view kBuiltinDangling = R"(# Function words that leave a lyric line unfinished when they end it.
of
to
for
the
a
an
and
or
but
my
your
his
her
its
our
their
is
are
was
were
am
that
which
who
with
in
on
at
by
from
)";

inline const WordSet& builtin_stopwords() {
  static const WordSet s = WordSet::parse(kBuiltinStopwords);
  return s;
}

inline const WordSet& builtin_dangling() {
  static const WordSet s = WordSet::parse(kBuiltinDangling);
  return s;
}

}  // namespace tunesmith

#include "tokkit/bench.hpp"

#include <algorithm>
#include <cfenv>

#include <nlohmann/json.hpp>
#include <cmath>
#include <sstream>

#include "tokkit/errors.hpp"
#include "tokkit/unicode.hpp"

namespace tokkit::bench {

namespace {

int category_order(const std::string& category) {
  if (category == "general") return 0;
  if (category == "code") return 1;
  if (category == "stem") return 2;
  return 3;
}

int language_order(const std::string& language) {
  if (language == "en") return 0;
  if (language == "ko") return 1;
  return 2;
}

bool domain_before(const DomainCorpus& a, const DomainCorpus& b) {
  const int la = language_order(a.language), lb = language_order(b.language);
  if (la != lb) return la < lb;
  if (a.language != b.language) return a.language < b.language;
  const int ca = category_order(a.category), cb = category_order(b.category);
  if (ca != cb) return ca < cb;
  return a.name < b.name;
}

}  // namespace

DomainCorpus make_domain(std::string name, std::vector<std::string> docs) {
  DomainCorpus d;
  const auto dash = name.find('-');
  if (dash != std::string::npos) {
    d.language = name.substr(0, dash);
    d.category = name.substr(dash + 1);
  } else {
    d.language = name;
    d.category = "general";
  }
  d.name = std::move(name);
  d.docs = std::move(docs);
  return d;
}

double compression_rate(const bpe::Vocab& vocab, const DomainCorpus& corpus) {
  if (corpus.docs.empty()) {
    throw DomainEmptyError("domain has no documents: " + corpus.name);
  }
  uint64_t chars = 0;
  uint64_t tokens = 0;
  for (const std::string& doc : corpus.docs) {
    chars += unicode::count_chars(doc);
    tokens += bpe::encode(vocab, doc).size();
  }
  if (tokens == 0) {
    if (chars == 0) return 1.0;  // corpus of empty documents
    throw InternalError("nonempty text encoded to zero tokens");
  }
  return static_cast<double>(chars) / static_cast<double>(tokens);
}

CompressionReport report(const std::map<std::string, bpe::Vocab>& tokenizers,
                         const std::vector<DomainCorpus>& domains) {
  if (tokenizers.empty() || domains.empty()) {
    throw InvalidArgumentError("report needs at least one tokenizer and one domain");
  }
  std::vector<const DomainCorpus*> ordered;
  ordered.reserve(domains.size());
  for (const DomainCorpus& d : domains) ordered.push_back(&d);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const DomainCorpus* a, const DomainCorpus* b) {
                     return domain_before(*a, *b);
                   });

  CompressionReport rep;
  for (const DomainCorpus* d : ordered) rep.domain_order.push_back(d->name);
  for (const auto& [name, vocab] : tokenizers) {
    for (const DomainCorpus* d : ordered) {
      try {
        rep.rows[name][d->name] = compression_rate(vocab, *d);
      } catch (const Error& e) {
        throw Error("measuring " + name + " on " + d->name + ": " + e.what());
      }
    }
  }
  return rep;
}

std::string format_rate(double rate) {
  // nearbyint under the default FE_TONEAREST mode rounds ties to even.
  const double scaled = std::nearbyint(rate * 10000.0);
  const auto n = static_cast<long long>(scaled);
  std::ostringstream out;
  if (n < 0) out << '-';
  const long long a = std::llabs(n);
  out << a / 10000 << '.';
  const long long frac = a % 10000;
  out << char('0' + frac / 1000) << char('0' + frac / 100 % 10)
      << char('0' + frac / 10 % 10) << char('0' + frac % 10);
  return out.str();
}

std::string render_table(const CompressionReport& report) {
  size_t name_width = std::string("Tokenizer").size();
  for (const auto& [name, row] : report.rows) {
    name_width = std::max(name_width, name.size());
  }
  std::vector<size_t> widths;
  for (const std::string& domain : report.domain_order) {
    widths.push_back(std::max<size_t>(domain.size(), 7));
  }

  std::ostringstream out;
  out << "Tokenizer" << std::string(name_width - 9, ' ');
  for (size_t i = 0; i < report.domain_order.size(); ++i) {
    const std::string& domain = report.domain_order[i];
    out << "  " << std::string(widths[i] - domain.size(), ' ') << domain;
  }
  out << '\n';

  for (const auto& [name, row] : report.rows) {
    out << name << std::string(name_width - name.size(), ' ');
    for (size_t i = 0; i < report.domain_order.size(); ++i) {
      const std::string cell = format_rate(row.at(report.domain_order[i]));
      out << "  " << std::string(widths[i] - cell.size(), ' ') << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json(const CompressionReport& report) {
  // Hand-rolled so the rate text keeps exactly four decimals.
  auto quoted = [](const std::string& s) { return nlohmann::json(s).dump(); };
  std::ostringstream out;
  out << '{';
  bool first_tok = true;
  for (const auto& [name, row] : report.rows) {
    if (!first_tok) out << ',';
    first_tok = false;
    out << quoted(name) << ":{";
    bool first_dom = true;
    for (const std::string& domain : report.domain_order) {
      if (!first_dom) out << ',';
      first_dom = false;
      out << quoted(domain) << ':' << format_rate(row.at(domain));
    }
    out << '}';
  }
  out << '}';
  return out.str();
}

}  // namespace tokkit::bench

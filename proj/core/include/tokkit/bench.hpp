#pragma once

#include <map>
#include <string>
#include <vector>

#include "tokkit/bpe.hpp"

namespace tokkit::bench {

/// A named measurement corpus. Domain names follow the {language}-{category}
/// convention ("en-general", "ko-stem"); rendering orders columns English
/// before Korean and general/code/stem within a language.
struct DomainCorpus {
  std::string name;
  std::vector<std::string> docs;
  std::string language;  // "en", "ko", ...
  std::string category;  // "general", "code", "stem"
};

/// Builds a DomainCorpus from a "{lang}-{category}" name.
DomainCorpus make_domain(std::string name, std::vector<std::string> docs);

/// Characters per token, pooled over the whole corpus: total Unicode scalar
/// count divided by total token count. Throws DomainEmptyError when the
/// corpus has no documents.
double compression_rate(const bpe::Vocab& vocab, const DomainCorpus& corpus);

struct CompressionReport {
  /// tokenizer name → domain name → chars per token
  std::map<std::string, std::map<std::string, double>> rows;
  /// Column order used by the renderers.
  std::vector<std::string> domain_order;
};

/// Full cross product of rates. Throws InvalidArgumentError when either input
/// is empty; compression failures carry (tokenizer, domain) context.
CompressionReport report(const std::map<std::string, bpe::Vocab>& tokenizers,
                         const std::vector<DomainCorpus>& domains);

/// Aligned plain-text table, domains in column order, one tokenizer per row.
std::string render_table(const CompressionReport& report);

/// {"tokenizer":{"domain":rate}} with rates printed to exactly four decimal
/// places, rounded half to even.
std::string to_json(const CompressionReport& report);

/// Four-decimal half-even formatting used by the JSON/table renderers.
std::string format_rate(double rate);

}  // namespace tokkit::bench

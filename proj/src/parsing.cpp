#include "econlab/parsing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

namespace econlab {

namespace {

std::string lowercase(const std::string& s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_json_fence(const std::string& text, std::size_t fence_pos,
                   std::size_t* content_start) {
    std::size_t p = fence_pos + 3;
    while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
    static const char tag[] = "json";
    for (std::size_t k = 0; k < 4; ++k, ++p) {
        if (p >= text.size() ||
            std::tolower(static_cast<unsigned char>(text[p])) != tag[k])
            return false;
    }
    while (p < text.size() && (text[p] == ' ' || text[p] == '\t' || text[p] == '\r'))
        ++p;
    if (p < text.size() && text[p] == '\n') ++p;
    *content_start = p;
    return true;
}

// Bodies of every ```json ... ``` block, in order. Blocks with another
// language tag (or none) are skipped wholesale.
std::vector<std::string> json_blocks(const std::string& text) {
    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while ((pos = text.find("```", pos)) != std::string::npos) {
        std::size_t content = 0;
        const bool json = is_json_fence(text, pos, &content);
        if (!json) {
            const std::size_t line_end = text.find('\n', pos + 3);
            content = line_end == std::string::npos ? text.size() : line_end + 1;
        }
        const std::size_t closing = text.find("```", content);
        if (closing == std::string::npos) break;
        if (json) blocks.push_back(text.substr(content, closing - content));
        pos = closing + 3;
    }
    return blocks;
}

ParseOutcome failure(ParseStatus status, std::string detail) {
    ParseOutcome out;
    out.status = status;
    out.detail = std::move(detail);
    return out;
}

}  // namespace

std::string to_string(ParseStatus s) {
    switch (s) {
        case ParseStatus::valid: return "valid";
        case ParseStatus::refusal: return "refusal";
        case ParseStatus::format: return "format";
        case ParseStatus::constraint: return "constraint";
    }
    return "format";
}

std::vector<ParseOutcome> extract_json_allocation(const std::string& text,
                                                  const AnswerFields& fields,
                                                  std::size_t expected_count) {
    const auto blocks = json_blocks(text);
    if (blocks.size() != expected_count) {
        if (blocks.empty() && classify_refusal(text))
            return {failure(ParseStatus::refusal, "refusal, no json block")};
        std::ostringstream why;
        why << "expected " << expected_count << " json block(s), found "
            << blocks.size();
        return {failure(ParseStatus::format, why.str())};
    }
    std::vector<ParseOutcome> outcomes;
    outcomes.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto tag = [&](const std::string& why) {
            return "block " + std::to_string(i + 1) + ": " + why;
        };
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(blocks[i]);
        } catch (const nlohmann::json::exception& e) {
            outcomes.push_back(failure(ParseStatus::format, tag(e.what())));
            continue;
        }
        if (!j.is_object() || !j.contains(fields.field_a) ||
            !j.contains(fields.field_b)) {
            outcomes.push_back(
                failure(ParseStatus::format, tag("missing answer fields")));
            continue;
        }
        if (!j[fields.field_a].is_number() || !j[fields.field_b].is_number()) {
            outcomes.push_back(
                failure(ParseStatus::format, tag("non-numeric answer fields")));
            continue;
        }
        const double a = j[fields.field_a].get<double>();
        const double b = j[fields.field_b].get<double>();
        if (a < 0.0 || b < 0.0) {
            outcomes.push_back(
                failure(ParseStatus::constraint, tag("negative points")));
            continue;
        }
        if (std::abs(a + b - 100.0) > kAllocationSumTolerance) {
            std::ostringstream why;
            why << "points sum to " << (a + b) << ", not 100";
            outcomes.push_back(failure(ParseStatus::constraint, tag(why.str())));
            continue;
        }
        ParseOutcome ok;
        ok.status = ParseStatus::valid;
        ok.allocation = Allocation{a, b};
        outcomes.push_back(std::move(ok));
    }
    return outcomes;
}

ParseOutcome extract_bracket_value(const std::string& text,
                                   const GameScenario& scenario,
                                   AnswerType answer_type) {
    std::optional<double> value;
    int extra = 0;
    std::size_t pos = 0;
    while ((pos = text.find("[[", pos)) != std::string::npos) {
        std::size_t p = pos + 2;
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p])))
            ++p;
        if (p < text.size() && text[p] == '$') ++p;
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p])))
            ++p;
        const char* start = text.c_str() + p;
        char* end = nullptr;
        const double parsed = std::strtod(start, &end);
        if (end != start) {
            std::size_t q = p + static_cast<std::size_t>(end - start);
            while (q < text.size() &&
                   std::isspace(static_cast<unsigned char>(text[q])))
                ++q;
            if (q + 1 < text.size() && text[q] == ']' && text[q + 1] == ']') {
                if (!value)
                    value = parsed;
                else
                    ++extra;
                pos = q + 2;
                continue;
            }
        }
        pos += 2;  // not a numeric highlight (for example an echoed [[$x]])
    }
    if (!value) {
        if (classify_refusal(text))
            return failure(ParseStatus::refusal, "refusal, no highlighted value");
        return failure(ParseStatus::format, "no [[...]] highlighted value");
    }
    const DecisionValidity validity = validate_decision(scenario, *value, answer_type);
    if (!validity.valid) return failure(ParseStatus::constraint, validity.reason);
    ParseOutcome out;
    out.status = ParseStatus::valid;
    out.game = GameDecision{scenario.id, *value};
    if (extra > 0)
        out.detail = std::to_string(extra) + " extra highlighted value(s) ignored";
    return out;
}

bool classify_refusal(const std::string& text) {
    if (text.empty()) return false;
    static const char* kPatterns[] = {
        "as an ai",
        "as a language model",
        "i cannot participate",
        "i can't participate",
        "cannot participate in",
        "not capable of making decisions",
        "i cannot make decisions",
        "i can't make decisions",
        "unable to make decisions",
        "i cannot assist with",
        "i can't assist with",
        "i must decline",
        "i refuse to",
        "i will not provide",
        "i won't provide",
        "i don't feel comfortable",
        "i do not feel comfortable",
    };
    const std::string lower = lowercase(text);
    for (const char* pattern : kPatterns)
        if (lower.find(pattern) != std::string::npos) return true;
    return false;
}

}  // namespace econlab

#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "teachqa/teachqa.hpp"

namespace teachqa::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("teachqa-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Small course kb used across the unit suites.
inline KnowledgeBase tiny_kb() {
    KnowledgeBase kb;
    kb.domain = "tiny";
    kb.categories = {{"teachingstaff", CategoryKind::unstructured},
                     {"importantdates", CategoryKind::unstructured},
                     {"courseprerequisites", CategoryKind::unstructured},
                     {"coursematerials", CategoryKind::unstructured},
                     {"duedate", CategoryKind::structured},
                     {"url", CategoryKind::structured},
                     {"weight", CategoryKind::structured}};
    kb.unstructured = {
        {1, "teachingstaff", {}, "Taught by the instructor.", "syllabus#staff"},
        {2, "importantdates", {"withdraw date"}, "Withdraw by week 10.", "syllabus#dates"},
        {3, "importantdates", {"start date"}, "Classes start in week 1.", "syllabus#dates"},
        {4, "courseprerequisites", {"python", "C"}, "Know how to program.", "syllabus#prereq"},
        {5, "coursematerials", {"course materials"}, "See the reader.", "syllabus#materials"},
        {6, "coursematerials", {"websites"}, "See the course site.", "syllabus#web"},
    };
    kb.structured = {
        {1, "Assignment 1", {"assignment 1", "a1"}, {{"duedate", "June 15"}, {"url", "http://x"}}},
        {2, "Assignment 2", {"assignment 2", "a2"}, {{"duedate", "July 1"}}},
        {3, "Assignment", {"assignment"}, {{"weight", "10%"}}},
    };
    return kb;
}

inline std::vector<QuestionTemplate> tiny_templates() {
    return {
        {1, "teachingstaff", std::nullopt, "Who teaches this class?", true},
        {2, "importantdates", "unstructured:importantdates", "When is the {object}?", true},
        {3, "courseprerequisites", "unstructured:courseprerequisites",
         "Do we need to know {object} to take this course?", true},
        {4, "coursematerials", "unstructured:coursematerials", "What are the {object} for the course?", false},
        {5, "duedate", "structured:object_keywords", "When is {object} due?", false},
        {6, "url", "structured:object_keywords", "What is the link to {object}?", false},
        {7, "weight", "structured:object_keywords", "How much is {object} worth?", false},
    };
}

/// Random word from a small vocabulary so that generated corpora share
/// features across classes.
inline std::string random_sentence(std::mt19937_64& rng, std::size_t max_words = 5) {
    static const std::vector<std::string> words = {
        "when", "is", "the", "due", "who", "teaches", "class", "office", "hours", "project",
        "exam", "grade", "late", "policy", "what", "how", "much", "worth", "a1", "python"};
    std::uniform_int_distribution<std::size_t> len(0, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::string out;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out.push_back(' ');
        out += words[pick(rng)];
    }
    return out;
}

}  // namespace teachqa::testing

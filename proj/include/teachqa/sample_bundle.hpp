#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "teachqa/kb.hpp"
#include "teachqa/templates.hpp"

// Sample workspace for a graduate course on knowledge-based AI. Written by
// `teachqa init`; also the fixture behind the acceptance suite.

namespace teachqa {

inline KnowledgeBase sample_kb() {
    KnowledgeBase kb;
    kb.domain = "Knowledge-Based AI (sample course)";

    for (const char* label :
         {"coursedescription", "teachingstaff", "officehours", "learning", "lateworkpolicy",
          "intellectualpropertypolicy", "importantdates", "disabilityaccomodations",
          "courseprerequisites", "coursematerials", "grade", "definition"})
        kb.categories.push_back({label, CategoryKind::unstructured});
    for (const char* label : {"description", "weight", "releasedate", "duedate", "week", "submission",
                              "grading", "duration", "estimatedtime", "url", "resources", "guideline"})
        kb.categories.push_back({label, CategoryKind::structured});

    const std::string syllabus = "https://example.edu/kbai/syllabus";
    std::int64_t id = 0;
    auto fact = [&](const char* label, std::vector<std::string> keywords, const char* text,
                    std::string source) {
        kb.unstructured.push_back({++id, label, std::move(keywords), text, std::move(source)});
    };

    fact("coursedescription",
         {"artificial intelligence", "knowledge representation", "analogical reasoning",
          "metacognition", "visual reasoning", "commonsense reasoning"},
         "The course covers knowledge-based artificial intelligence: representations, reasoning "
         "strategies, learning from cases, analogy, and metacognition, built around agents that "
         "solve human-like intelligence tests.",
         syllabus + "#description");
    fact("teachingstaff", {},
         "The course is taught by the instructor of record together with a team of teaching "
         "assistants; the staff page lists everyone and their roles.",
         syllabus + "#staff");
    fact("officehours", {},
         "Office hours are held every week over video; the schedule is pinned on the forum.",
         syllabus + "#office-hours");
    fact("learning", {},
         "By the end of the course you will be able to design, implement and evaluate "
         "knowledge-based agents and explain how they relate to human cognition.",
         syllabus + "#learning-goals");
    fact("lateworkpolicy", {},
         "Late work is not accepted without a documented emergency; contact the instructor "
         "before the deadline if something comes up.",
         syllabus + "#late-work");
    fact("intellectualpropertypolicy", {},
         "Course materials and your solutions may not be posted publicly, including on public "
         "code repositories.",
         syllabus + "#intellectual-property");
    fact("importantdates", {"withdraw date"},
         "The last day to withdraw with a W is the Friday of week 10.", syllabus + "#dates");
    fact("importantdates", {"start date"},
         "Classes start on the Monday of the first week of the semester.", syllabus + "#dates");
    fact("importantdates", {"drop date"},
         "The drop date without penalty is the Friday of week 1.", syllabus + "#dates");
    fact("importantdates", {"registration date"},
         "Registration for the next semester opens in week 12.", syllabus + "#dates");
    fact("importantdates", {"last day of classes"},
         "The last day of classes is the Friday of week 16.", syllabus + "#dates");
    fact("disabilityaccomodations", {},
         "Students needing accommodations should contact the Office of Disability Services, "
         "which will send the instructor an accommodation letter.",
         syllabus + "#accommodations");
    fact("courseprerequisites", {"python", "C"},
         "You should be comfortable programming; the projects are written in Python.",
         syllabus + "#prerequisites");
    fact("courseprerequisites", {"linear algebra", "probability", "calculus"},
         "No advanced mathematics is required beyond basic probability.",
         syllabus + "#prerequisites");
    fact("coursematerials", {"course materials", "textbook", "readings"},
         "The required text is the course reader; readings are listed per lesson.",
         syllabus + "#materials");
    fact("coursematerials", {"websites", "lecture videos", "slides"},
         "Lecture videos and slides are hosted on the course website.",
         syllabus + "#materials");
    fact("grade", {},
         "Final grades use fixed cutoffs: 90 and above is an A, 80 and above a B, 70 and above a C.",
         syllabus + "#grading-scale");

    const std::pair<const char*, const char*> terms[] = {
        {"semantic networks", "A semantic network represents knowledge as nodes joined by labeled links."},
        {"frames", "A frame is a structured representation of a stereotyped situation with slots and fillers."},
        {"production systems", "A production system encodes knowledge as if-then rules matched against working memory."},
        {"means ends analysis", "Means-ends analysis reduces the difference between the current state and the goal."},
        {"generate and test", "Generate and test proposes candidate solutions and checks each against the goal."},
        {"case based reasoning", "Case-based reasoning solves new problems by adapting solutions to similar past cases."},
        {"constraint propagation", "Constraint propagation narrows possible values by enforcing constraints locally."},
        {"version spaces", "Version spaces track the most general and most specific models consistent with examples."},
    };
    for (const auto& [term, text] : terms)
        fact("definition", {term}, text, syllabus + "#glossary");

    using Attrs = std::map<std::string, std::string>;
    id = 0;
    auto entity = [&](const char* name, std::vector<std::string> keywords, Attrs attrs) {
        kb.structured.push_back({++id, name, std::move(keywords), std::move(attrs)});
    };

    const std::string site = "https://example.edu/kbai/";
    for (int n = 1; n <= 3; ++n) {
        const auto k = std::to_string(n);
        entity(("Assignment " + k).c_str(), {"assignment " + k, "a" + k, "homework " + k},
               {{"description", "Assignment " + k + " asks for a short design report on problem set " + k + "."},
                {"weight", std::to_string(5 + n) + "% of the final grade"},
                {"releasedate", "Week " + std::to_string(3 * n - 2) + " Monday"},
                {"duedate", "Week " + std::to_string(3 * n) + " Sunday 23:59 AoE"},
                {"week", "Weeks " + std::to_string(3 * n - 2) + "-" + std::to_string(3 * n)},
                {"submission", "Submit a PDF of Assignment " + k + " on the course site."},
                {"grading", "Graded with the written-assignment rubric, 100 points."},
                {"estimatedtime", std::to_string(8 + n) + " hours"},
                {"url", site + "assignments/" + k},
                {"resources", "Lessons " + std::to_string(2 * n - 1) + " and " + std::to_string(2 * n)},
                {"guideline", "Stay under 5 pages in JDF format."}});
    }
    for (int n = 1; n <= 3; ++n) {
        const auto k = std::to_string(n);
        entity(("Project " + k).c_str(), {"project " + k, "p" + k},
               {{"description", "Project " + k + " builds an agent for problem set " + k + " of the intelligence test."},
                {"weight", std::to_string(10 + n) + "% of the final grade"},
                {"releasedate", "Week " + std::to_string(4 * n - 3) + " Monday"},
                {"duedate", "Week " + std::to_string(4 * n + 1) + " Sunday 23:59 AoE"},
                {"week", "Weeks " + std::to_string(4 * n - 3) + "-" + std::to_string(4 * n + 1)},
                {"submission", "Submit code through the autograder and a report for Project " + k + "."},
                {"grading", "Graded on autograder performance and the project report."},
                {"duration", "4 weeks"},
                {"estimatedtime", std::to_string(20 + 5 * n) + " hours"},
                {"url", site + "projects/" + k},
                {"resources", "Project starter code and the agent guide"},
                {"guideline", "Agents must run within the time limit of the autograder."}});
    }
    for (int n = 1; n <= 2; ++n) {
        const auto k = std::to_string(n);
        entity(("Mini-Project " + k).c_str(), {"mini project " + k, "mp" + k},
               {{"description", "Mini-Project " + k + " solves a classic puzzle with a simple agent."},
                {"weight", "3% of the final grade"},
                {"releasedate", "Week " + std::to_string(5 * n) + " Monday"},
                {"duedate", "Week " + std::to_string(5 * n + 1) + " Sunday 23:59 AoE"},
                {"week", "Week " + std::to_string(5 * n)},
                {"submission", "Submit through the autograder."},
                {"grading", "Graded by autograder test cases."},
                {"duration", "2 weeks"},
                {"url", site + "mini-projects/" + k}});
    }
    entity("Midterm Exam", {"midterm exam", "midterm"},
           {{"description", "Open-book exam covering lessons 1 to 12."},
            {"weight", "15% of the final grade"},
            {"releasedate", "Week 8 Monday"},
            {"duedate", "Week 8 Sunday 23:59 AoE"},
            {"week", "Week 8"},
            {"grading", "Graded by the teaching assistants with a shared key."},
            {"duration", "One week window"},
            {"url", site + "exams/midterm"},
            {"guideline", "Individual work only; cite any source you consult."}});
    entity("Final Exam", {"final exam"},
           {{"description", "Open-book exam covering the whole course."},
            {"weight", "15% of the final grade"},
            {"releasedate", "Week 15 Monday"},
            {"duedate", "Week 16 Sunday 23:59 AoE"},
            {"week", "Week 15-16"},
            {"grading", "Graded by the teaching assistants with a shared key."},
            {"duration", "One week window"},
            {"url", site + "exams/final"},
            {"guideline", "Individual work only; cite any source you consult."}});
    entity("Lesson 1", {"lesson 1", "intro lesson"},
           {{"description", "Introduction to knowledge-based AI."},
            {"week", "Week 1"},
            {"duration", "45 minutes of video"},
            {"estimatedtime", "2 hours"},
            {"url", site + "lessons/1"},
            {"resources", "Chapter 1 of the course reader"}});
    entity("Class Participation", {"class participation", "participation"},
           {{"description", "Forum activity and peer feedback throughout the term."},
            {"weight", "10% of the final grade"},
            {"grading", "Graded on the number and quality of forum contributions."},
            {"guideline", "Contribute at least once per week."}});
    return kb;
}

inline std::vector<QuestionTemplate> sample_templates() {
    std::vector<QuestionTemplate> out;
    std::int64_t id = 0;
    // A null source marks a slotless template.
    auto add = [&](const char* intent, const char* source, const char* text, bool example = false) {
        out.push_back({++id, intent,
                       source ? std::optional<std::string>(source) : std::nullopt, text, example});
    };

    // Ways students refer to the course itself.
    const char* course = "literal:this class|this course|the course|KBAI|CS 7637";

    add("coursedescription", "unstructured:coursedescription",
        "Will we learn about {user} in this class?", true);
    add("coursedescription", "unstructured:coursedescription", "Does this course cover {object}?");
    add("coursedescription", "unstructured:coursedescription", "Is {object} a topic in this course?");
    add("coursedescription", course, "What will we study in {course}?");
    add("coursedescription", course, "What topics does {course} cover?");
    add("coursedescription", course, "Can you give me an overview of {course}?");
    add("coursedescription", course, "What is covered in {course}?");

    add("teachingstaff", nullptr, "Who teaches this class?", true);
    add("teachingstaff", course, "Who teaches {course}?");
    add("teachingstaff", course, "Who is the instructor of {course}?");
    add("teachingstaff", course, "Who are the TAs for {course}?");
    add("teachingstaff", course, "Who is the professor for {course}?");
    add("teachingstaff", course, "Who are the teaching assistants in {course}?");
    add("teachingstaff", course, "Who is on the teaching staff of {course}?");

    add("officehours", nullptr, "When are office hours this week?", true);
    add("officehours", course, "Are there office hours for {course}?");
    add("officehours", course, "What time are office hours held for {course}?");
    add("officehours", course, "How do I join office hours in {course}?");
    add("officehours", course, "Where are the office hours of {course}?");
    add("officehours", course, "When can I meet a TA during office hours for {course}?");

    add("learning", nullptr, "What are the learning goals of this class?", true);
    add("learning", course, "What will I be able to do after {course}?");
    add("learning", course, "What are the learning outcomes of {course}?");
    add("learning", course, "What skills will I gain from {course}?");
    add("learning", course, "What are the learning objectives of {course}?");
    add("learning", course, "What are the learning goals of {course}?");

    add("lateworkpolicy", nullptr, "What is the penalty for submitting work past the deadline?", true);
    add("lateworkpolicy", course, "Can I submit late in {course}?");
    add("lateworkpolicy", course, "Is late work accepted in {course}?");
    add("lateworkpolicy", course, "What is the late policy of {course}?");
    add("lateworkpolicy", course, "Can I get an extension in {course}?");
    add("lateworkpolicy", course, "What happens if I miss a deadline in {course}?");
    add("lateworkpolicy", course, "What is the late penalty in {course}?");

    add("intellectualpropertypolicy", nullptr, "Can I post my work on a public platform?", true);
    add("intellectualpropertypolicy", course, "Can I put my code from {course} on GitHub?");
    add("intellectualpropertypolicy", course, "Am I allowed to share my solutions to {course} publicly?");
    add("intellectualpropertypolicy", course, "Can I publish my projects from {course} online?");
    add("intellectualpropertypolicy", course, "Who owns the work I create in {course}?");
    add("intellectualpropertypolicy", course, "Can I post my work from {course} on a public platform?");

    add("importantdates", "unstructured:importantdates", "When is the {object}?", true);
    add("importantdates", "unstructured:importantdates", "What is the date of the {object}?");
    add("importantdates", "unstructured:importantdates", "Which day is the {object} this semester?");
    add("importantdates", "unstructured:importantdates", "When is the {object} this term?");
    add("importantdates", "unstructured:importantdates", "Remind me of the {object} on the calendar.");
    add("importantdates", course, "What are the important dates for {course}?");
    add("importantdates", course, "Where is the calendar of important dates for {course}?");

    add("disabilityaccomodations", nullptr,
        "Where can I find information about Disability Services?", true);
    add("disabilityaccomodations", course, "How do I request accommodations for {course}?");
    add("disabilityaccomodations", course, "I have a disability, who should I contact in {course}?");
    add("disabilityaccomodations", course, "How do I get accommodations for a disability in {course}?");
    add("disabilityaccomodations", course, "Does {course} support disability accommodations?");
    add("disabilityaccomodations", course, "Where can I find information about Disability Services for {course}?");

    add("courseprerequisites", "unstructured:courseprerequisites",
        "Do we need to know {object} to take this course?", true);
    add("courseprerequisites", "unstructured:courseprerequisites",
        "Is {object} a prerequisite for this class?");
    add("courseprerequisites", "unstructured:courseprerequisites",
        "Should I learn {object} before starting the course?");
    add("courseprerequisites", course, "What are the prerequisites for {course}?");
    add("courseprerequisites", course, "What background do I need for {course}?");

    add("coursematerials", "unstructured:coursematerials", "What are the {object} for the course?", true);
    add("coursematerials", "unstructured:coursematerials", "Where do I find the {object}?");
    add("coursematerials", "unstructured:coursematerials", "Are {object} provided for this class?");
    add("coursematerials", course, "Is there a required book for {course}?");
    add("coursematerials", course, "Which textbook does {course} use?");

    add("grade", course, "How are final letter grades determined in {course}?");
    add("grade", course, "Which grading scale does {course} use?");
    add("grade", course, "What score do I need for an A in {course}?");
    add("grade", course, "Are grades curved in {course}?");
    add("grade", course, "What are the letter grade cutoffs for {course}?");

    add("definition", "unstructured:definition", "Can you give an explanation for {object}?", true);
    add("definition", "unstructured:definition", "What does {object} mean?");
    add("definition", "unstructured:definition", "Define {object}.");
    add("definition", "unstructured:definition", "Can you explain the concept of {object}?");

    const std::pair<const char*, std::vector<const char*>> attribute_templates[] = {
        {"description", {"What is {object} about?", "Can you describe {object}?",
                         "Give me a summary of {object}.", "What do we do in {object}?"}},
        {"weight", {"How much is {object} worth?", "What is the weight of {object}?",
                    "How many points is {object} worth?", "What percent of the course grade is {object}?"}},
        {"releasedate", {"When will {object} be released?", "When is {object} released?",
                         "When does {object} come out?", "When is {object} published?"}},
        {"duedate", {"When is {object} due?", "What is the due date for {object}?",
                     "What is the deadline for {object}?", "When do I have to turn in {object} by?"}},
        {"week", {"Which week is {object} in?", "What week is {object} scheduled for?",
                  "In which week of the semester do we do {object}?"}},
        {"submission", {"How do I submit {object}?", "Where do I upload {object}?",
                        "What file format should {object} be submitted in?"}},
        {"grading", {"How will {object} be graded?", "What is the rubric for {object}?",
                     "Who grades {object}?"}},
        {"duration", {"How long is {object} open?", "What is the time window for {object}?",
                      "How many days do we get for {object}?"}},
        {"estimatedtime", {"How many hours will {object} take?",
                           "How much time should I spend on {object}?",
                           "What is the expected workload of {object}?"}},
        {"url", {"What is the link to {object}?", "Where is the webpage for {object}?",
                 "Can you send the url of {object}?"}},
        {"resources", {"What resources are available for {object}?",
                       "Which materials help with {object}?", "What should I study to prepare for {object}?"}},
        {"guideline", {"What are the guidelines for {object}?", "Are there any rules for {object}?",
                       "What requirements must {object} follow?"}},
    };
    for (const auto& [attr, texts] : attribute_templates) {
        for (std::size_t i = 0; i < texts.size(); ++i)
            add(attr, "structured:object_keywords", texts[i], i == 0);
    }
    add("duedate", "structured:identified", "By when must {object} be finished?");
    add("weight", "structured:identified", "How much does {object} count toward my grade?");
    add("url", "structured:identified", "Where can I find {object} online?");

    return out;
}

}  // namespace teachqa

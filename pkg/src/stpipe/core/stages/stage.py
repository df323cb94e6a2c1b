import ast
import collections
import copy
import logging
import traceback

from weakref import WeakKeyDictionary

from six import with_metaclass
from six.moves import zip_longest

from stpipe.core.corpus import ParallelCorpus, write_lines, write_nbest, write_parallel
from stpipe.core.engine.artifact import Artifact, NBEST, RAW, TOKENS
from stpipe.core.engine.resolver import Resolver
from stpipe.core.exceptions import AlignmentMismatch, PipelineValidationException, StageFailure, StpipeException


class StageAttribute(object):
    """ A Descriptor Class intended for use with Stage Objects. Using these descriptor
        objects allows us to store metadata about each attribute on a Stage, such
        as the expected type, the accepted values, and a description.
    """

    def __init__(self, default_value=None, attribute_options=None, attribute_type=None,
                 required=False, serialize=True, description=None):
        """ Initialize the StageAttribute object.

            Kwargs:
                default_value (any): The default value of the attribute
                attribute_options (list): List of accepted values for the attribute.
                attribute_type (Type): Expected type of the value received.
                required (bool): Whether or not this attribute is required for execution.
                serialize (bool): Whether or not this attribute gets included in
                    the __repr__ output.
                description (str): Description of this attribute.
        """

        # WARNING: Entries disappear when a stage is garbage collected. Don't
        # iterate through this dictionary!
        self.data = WeakKeyDictionary()

        self.default_value = default_value
        self.attribute_options = attribute_options
        self.attribute_type = attribute_type
        self.serialize = serialize
        self.description = description
        self.required = required

    def __get__(self, instance, instance_type=None):
        """ Getter function. Will return the stored value for the specified instance
            if it exists, otherwise a private copy of the default_value.
        """

        if instance is not None:
            # Mutable defaults (list, dict) would otherwise be shared by every
            # instance of the stage type.
            data = self.data.get(instance)
            if data is None:
                data = copy.deepcopy(self.default_value)
                self.data[instance] = data
            return data
        else:
            # Class level access returns the descriptor itself so the metadata
            # is easy to reach.
            return self

    def __set__(self, instance, value):
        """ Setter function. Checks the value against attribute_options and converts
            it to attribute_type before storing it.

            Note: Values read from config files or the command line are often
                strings, so we try to convert before dismissing a value.

            Raises:
                ValueError: Value is not one of the options, or cannot be converted.
        """

        if value is None:
            return

        if self.attribute_options is not None:
            if value not in self.attribute_options:
                passed = False
                for option in self.attribute_options:
                    try:
                        converted_value = self._convert_to_type(value, type(option))
                        if converted_value == option:
                            passed = True
                            value = converted_value
                            break
                    except (TypeError, ValueError):
                        pass
                if not passed:
                    raise ValueError("Invalid value '%s' received. Expected one of %s" % (value, self.attribute_options))

        if self.attribute_type is not None:
            value = self._convert_to_type(value, self.attribute_type)

        self.data[instance] = value

    def _convert_to_type(self, value, attribute_type):
        """ Utility function to attempt to convert an object to a specific type.

            Args:
                value (object): A python object to attempt to convert to type
                attribute_type (Type): A type to try and convert to.

            Returns:
                Object converted to the desired type.

            Raises:
                ValueError: If unable to convert to the specified type.
        """
        if isinstance(value, attribute_type) and not (isinstance(value, bool) and attribute_type is not bool):
            return value

        if attribute_type is float and isinstance(value, int) and not isinstance(value, bool):
            return float(value)

        if isinstance(value, str) and not issubclass(attribute_type, str):
            try:
                converted_value = ast.literal_eval(value.strip())
            except (SyntaxError, ValueError):
                if attribute_type is bool and value.strip().lower() in ("true", "false", "yes", "no"):
                    return value.strip().lower() in ("true", "yes")
                raise ValueError("Value '%s' could not be parsed as %s." % (value, attribute_type.__name__))
            return self._convert_to_type(converted_value, attribute_type)

        if attribute_type in (list, dict):
            raise ValueError("Invalid type '%s' received. Expected %s" % (type(value).__name__, attribute_type.__name__))

        try:
            return attribute_type(value)
        except (TypeError, ValueError):
            raise ValueError("Invalid type '%s' received. Expected %s" % (type(value).__name__, attribute_type.__name__))


class StageType(type):

    def __new__(meta, name, bases, dct):
        classObj = super(StageType, meta).__new__(meta, name, bases, dct)

        # Keep the descriptors in definition order; base class attributes first.
        classObj.stage_attributes = collections.OrderedDict()
        for cl in reversed(classObj.__mro__[:-1]):
            for attr_name, attr in list(cl.__dict__.items()):
                if isinstance(attr, StageAttribute):
                    classObj.stage_attributes[attr_name] = attr

        # Only concrete stages declare a stage_type; those get registered.
        from stpipe.core.stages import all_stages
        if dct.get("stage_type"):
            all_stages[dct["stage_type"]] = classObj

        return classObj


class Stage(with_metaclass(StageType, object)):
    """ Base Object used for every stage. A StageGraph chains stages, feeding each
        one the Artifact produced by its predecessor.

        Includes the following methods to be overridden by children:
            validate *Optional* - Checks the configured attributes.

            setup *Optional* - Loads models or other resources the run needs.

            run *Required* - Reads the input artifact and returns a new one.

        Class level settings:
            stage_type (str): Name used in config files. Registers the class.
            input_kinds (tuple): Artifact kinds the stage accepts.
            output_kind (str): Artifact kind produced; None keeps the input kind.
    """

    stage_type = None
    input_kinds = (TOKENS,)
    output_kind = None

    name = StageAttribute(attribute_type=str, required=True, description="Stage id, unique within a pipeline.")
    description = StageAttribute(default_value="", attribute_type=str)
    dependencies = StageAttribute(
        default_value=[],
        attribute_type=list,
        serialize=False,
        description="Other stage ids that must run before this one.",
    )
    work_dir = StageAttribute(attribute_type=str, serialize=False, description="Directory for this stage's outputs.")

    def __init__(self, **kwargs):
        """ Initializes Stage object.

            Kwargs:
                Every StageAttribute of the stage type.

            Raises:
                PipelineValidationException: Unknown attribute, or a value the
                    attribute does not accept.
        """
        for arg in kwargs:
            if arg not in self.stage_attributes:
                raise PipelineValidationException(
                    "Stage '%s' (%s) has no attribute '%s'." % (kwargs.get("name"), self.stage_type, arg)
                )
            try:
                setattr(self, arg, kwargs[arg])
            except (TypeError, ValueError) as e:
                raise PipelineValidationException(
                    "Stage '%s' attribute '%s': %s" % (kwargs.get("name"), arg, e)
                )

        self.notes = collections.OrderedDict()
        self.extra_outputs = collections.OrderedDict()

    def copy(self):
        """ Creates a copy of itself.

            Note: copy.copy alone does not copy the values held by the descriptors.
        """
        other = copy.copy(self)
        for attribute_name in self.stage_attributes:
            setattr(other, attribute_name, copy.deepcopy(getattr(self, attribute_name)))
        return other

    def references(self):
        """ Stage ids (optionally "pipeline:stage") whose outputs this stage reads.
        """
        return []

    def output_kind_for(self, input_kind):
        """ Raises:
                PipelineValidationException: The stage does not accept input_kind.
        """
        if input_kind not in self.input_kinds:
            raise PipelineValidationException(
                "Stage '%s' (%s) expects %s input, got %s."
                % (self.name, self.stage_type, " or ".join(self.input_kinds), input_kind)
            )
        return self.output_kind or input_kind

    def __call__(self, context, artifact):
        """ Sets up, then runs this Stage Object.

            Returns:
                Artifact: The stage output.

            Raises:
                StageFailure: Wraps whatever made the stage fail.
        """
        self.notes = collections.OrderedDict()
        self.extra_outputs = collections.OrderedDict()
        try:
            self.setup(context)
            return self.run(context, artifact)
        except StpipeException as e:
            logging.error("Run method for stage '%s' Failed. Reason: %s" % (self.name, e))
            raise StageFailure(self.name, e)
        except Exception as e:
            logging.debug(traceback.format_exc())
            logging.error("Run method for stage '%s' Failed. Reason: %s" % (self.name, e))
            raise StageFailure(self.name, e)

    def validate(self):
        """ Checks that this Stage Object was properly configured.

            Raises:
                PipelineValidationException: A required attribute is missing.
        """
        for attribute_name, attribute_obj in self.stage_attributes.items():
            if attribute_obj.required and attribute_obj.__get__(self) in (None, ""):
                raise PipelineValidationException(
                    "Stage '%s' (%s) requires '%s'." % (self.name, self.stage_type, attribute_name)
                )

    def setup(self, context):
        pass

    def run(self, context, artifact):
        """ Abstract method for the work done by this Stage Object.

            Args:
                context (RunContext): Run wide state.
                artifact (Artifact): Output of the previous stage.

            Returns:
                Artifact
        """
        raise NotImplementedError("run method must be overridden by child class")

    def new_artifact(self, kind, with_target=True):
        return Artifact.in_directory(kind, self.work_dir, with_target=with_target)

    @classmethod
    def from_dict(cls, data_dict, replacements=None):
        """ Builds the stage from a config dictionary, resolving "{name}" replacements
            and $ENV variables in every value first.

            Note: None values are dropped so the StageAttribute defaults apply.
        """
        data_dict = Resolver(replacements).resolve(data_dict)

        filtered_data_dict = {}
        for key, value in list(data_dict.items()):
            if value is not None:
                filtered_data_dict[key] = value

        filtered_data_dict.pop("stage_type", None)
        return cls(**filtered_data_dict)

    def __repr__(self):
        """ Official string representation of self.
        """
        argStr = ""
        for attribute_name, attribute_obj in list(self.stage_attributes.items()):
            if attribute_obj.serialize:
                argStr = argStr + attribute_name + "=" + repr(attribute_obj.__get__(self)) + ", "
        argStr = argStr.rstrip(", ")

        return self.__class__.__name__ + "(" + argStr + ")"


class SentenceStage(Stage):
    """ Base for stages that rewrite every sentence independently.

        Children implement map_sentence. It receives a token list, or the raw
        line for raw input, and returns a token list.
    """

    input_kinds = (TOKENS, NBEST)

    sides = StageAttribute(
        default_value="both",
        attribute_options=["source", "target", "both"],
        attribute_type=str,
        description="Which sides of the corpus to rewrite.",
    )

    def map_sentence(self, sentence):
        raise NotImplementedError("map_sentence must be overridden by child class")

    def _applies_to(self, side):
        return self.sides in (side, "both")

    def _parse(self, kind, line):
        return line if kind == RAW else line.split()

    def _map_nbest(self, nbest_lists):
        for nbest in nbest_lists:
            nbest.hypotheses = [
                hypothesis._replace(tokens=list(self.map_sentence(hypothesis.tokens)))
                for hypothesis in nbest.hypotheses
            ]
            yield nbest

    def _map_lines(self, kind, lines, apply):
        for line in lines:
            if apply:
                yield u" ".join(self.map_sentence(self._parse(kind, line)))
            else:
                yield line

    def run(self, context, artifact):
        output_kind = self.output_kind_for(artifact.kind)
        output = self.new_artifact(output_kind, with_target=artifact.target_path is not None)

        if artifact.kind == NBEST:
            lists = artifact.nbest_lists()
            if self._applies_to("source"):
                lists = self._map_nbest(lists)
            output.rows = write_nbest(output.source_path, lists)
        else:
            output.rows = write_lines(
                output.source_path,
                self._map_lines(artifact.kind, artifact.source_lines(), self._applies_to("source")),
            )

        if artifact.target_path is not None:
            write_lines(
                output.target_path,
                self._map_lines(artifact.target_kind, artifact.target_lines(), self._applies_to("target")),
            )

        logging.info("Stage '%s': rewrote %d rows (%s)." % (self.name, output.rows, self.sides))
        return output


def write_pairs(artifact, pairs, name="pairs"):
    """ Writes (source tokens, target tokens) pairs to a tokens artifact.
    """
    corpus = ParallelCorpus(name, artifact.source_path, artifact.target_path)
    artifact.rows = write_parallel(corpus, ((u" ".join(source), u" ".join(target)) for source, target in pairs))
    return artifact


def aligned_pairs(sources, targets):
    """ Zips two streams that must have the same length.

        Raises:
            AlignmentMismatch: At the first line present in only one stream.
    """
    missing = object()
    for line_number, (source, target) in enumerate(zip_longest(sources, targets, fillvalue=missing), start=1):
        if source is missing or target is missing:
            raise AlignmentMismatch("Source and target streams differ in length.", line_number=line_number)
        yield source, target

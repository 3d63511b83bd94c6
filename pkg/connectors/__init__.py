from .appconfig import AppConfigClient
from .documents import DocumentClient, dumps
